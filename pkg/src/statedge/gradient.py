"""Sobel gradient field and sigmoid edge membership."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .imgcore import as_raster, convolve2d

SOBEL_X = np.array([[-1.0, 0.0, 1.0],
                    [-2.0, 0.0, 2.0],
                    [-1.0, 0.0, 1.0]])
SOBEL_Y = np.array([[1.0, 2.0, 1.0],
                    [0.0, 0.0, 0.0],
                    [-1.0, -2.0, -1.0]])


@dataclass(frozen=True)
class GradientField:
    gx: np.ndarray
    gy: np.ndarray
    magnitude: np.ndarray
    normalized: np.ndarray
    membership: np.ndarray
    k: float
    x0: float


def lower_median(values) -> float:
    """Median of a flat set, taking the lower middle for even counts."""
    flat = np.asarray(values, dtype=np.float64).ravel()
    if flat.size == 0:
        raise ValueError("median of an empty set")
    idx = (flat.size - 1) // 2
    return float(np.partition(flat, idx)[idx])


def membership(g, k=5.0, x0=0.0):
    """Sigmoid membership ``1 / (1 + exp(-k (g - x0)))``.

    Accepts scalars or arrays. ``k`` must be positive.
    """
    if not k > 0:
        raise ValueError("k must be positive")
    if not (math.isfinite(k) and math.isfinite(x0)):
        raise ValueError("k and x0 must be finite")
    if np.isscalar(g):
        if not math.isfinite(g):
            raise ValueError("membership input must be finite")
        return float(expit(k * (g - x0)))
    arr = np.asarray(g, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("membership input must be finite")
    return expit(k * (arr - x0))


def sobel(image, k=5.0) -> GradientField:
    """Sobel magnitude, its max-normalized version, and the membership map.

    The sigmoid midpoint is the median of the normalized magnitude, so the
    steepness ``k`` acts on the same [0, 1] scale for every image.
    """
    img = as_raster(image, channels=1)
    gx = convolve2d(img, SOBEL_X)
    gy = convolve2d(img, SOBEL_Y)
    mag = np.hypot(gx, gy)
    peak = mag.max()
    normalized = mag / peak if peak > 0 else np.zeros_like(mag)
    x0 = lower_median(normalized)
    return GradientField(
        gx=gx,
        gy=gy,
        magnitude=mag,
        normalized=normalized,
        membership=membership(normalized, k, x0),
        k=float(k),
        x0=x0,
    )
