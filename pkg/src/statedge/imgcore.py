"""
Image buffers and the small filter kit shared by every pipeline stage.

Images are plain ``numpy`` arrays of float64 intensities on the [0, 255]
scale: shape ``(H, W)`` for grayscale, ``(H, W, 3)`` for RGB. Quantization
to 8 bits only happens when a file is written (see :mod:`statedge.io`).
"""

import numpy as np
from scipy import ndimage

BORDER_MODES = {
    "replicate": "nearest",
    "reflect": "mirror",
    "zero": "constant",
}


def as_raster(image, channels=None) -> np.ndarray:
    """Validate ``image`` and return it as a float64 array.

    Parameters
    ----------
    image : array_like
        ``(H, W)`` or ``(H, W, 3)`` intensities.
    channels : {None, 1, 3}
        Required channel count, or ``None`` to accept either.
    """
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 2:
        nch = 1
    elif arr.ndim == 3 and arr.shape[2] == 3:
        nch = 3
    else:
        raise ValueError(f"expected (H, W) or (H, W, 3) image, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image must be at least 1x1")
    if channels is not None and nch != channels:
        raise ValueError(f"expected a {channels}-channel image, got {nch} channel(s)")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite values")
    return arr


def n_channels(image) -> int:
    return 1 if np.ndim(image) == 2 else 3


def clamp(image) -> np.ndarray:
    return np.clip(image, 0.0, 255.0)


def luma(image) -> np.ndarray:
    """Unweighted RGB mean; grayscale input is returned unchanged."""
    arr = as_raster(image)
    if arr.ndim == 2:
        return arr
    return arr.mean(axis=2)


def as_kernel(kernel) -> np.ndarray:
    k = np.asarray(kernel, dtype=np.float64)
    if k.ndim == 1 and k.size == 1:
        k = k.reshape(1, 1)
    if k.ndim != 2 or k.size == 0:
        raise ValueError("kernel must be a non-empty 2-D array")
    if k.shape[0] % 2 == 0 or k.shape[1] % 2 == 0:
        raise ValueError(f"kernel dimensions must be odd, got {k.shape}")
    return k


def convolve2d(image, kernel, border="replicate") -> np.ndarray:
    """Center-anchored correlation of a grayscale image with ``kernel``.

    ``out[y, x] = sum_ij kernel[i, j] * image[y + i - cy, x + j - cx]``;
    the kernel is applied as written (not flipped), so the Sobel matrices
    read the same way they are printed.
    """
    img = as_raster(image, channels=1)
    k = as_kernel(kernel)
    if border not in BORDER_MODES:
        raise ValueError(f"border must be one of {sorted(BORDER_MODES)}")
    return ndimage.correlate(img, k, mode=BORDER_MODES[border], cval=0.0)


def median_filter(image, size=5) -> np.ndarray:
    img = as_raster(image, channels=1)
    if int(size) != size or size < 1 or size % 2 == 0:
        raise ValueError(f"median size must be a positive odd integer, got {size}")
    return ndimage.median_filter(img, size=int(size), mode="nearest")


def dilate3x3(image) -> np.ndarray:
    img = as_raster(image, channels=1)
    return ndimage.grey_dilation(img, size=(3, 3), mode="nearest")


def erode3x3(image) -> np.ndarray:
    img = as_raster(image, channels=1)
    return ndimage.grey_erosion(img, size=(3, 3), mode="nearest")


def close3x3(image) -> np.ndarray:
    """Dilation followed by erosion; bridges one-pixel gaps in bright lines."""
    return erode3x3(dilate3x3(image))
