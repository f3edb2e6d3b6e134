"""
Fixed-kernel channel attention used to fuse RGB input into one edge-feature map.

Nothing here is trained. Each channel is passed through a depthwise 3x3
kernel (Laplacian by default), rectified, and max-pooled to one scalar
response; the responses are normalized into convex channel weights. Channels
carrying more edge energy therefore dominate the fused map. The kernel and
pooling geometry are an interpretation, and both can be overridden.
"""

from dataclasses import dataclass, field

import numpy as np

from .imgcore import as_kernel, as_raster, clamp, convolve2d

LAPLACIAN = np.array([[0.0, -1.0, 0.0],
                      [-1.0, 4.0, -1.0],
                      [0.0, -1.0, 0.0]])


@dataclass(frozen=True)
class AttentionConfig:
    """Parameters of the fixed attention block.

    ``pool_size=None`` pools over the whole image. An integer pools over
    non-overlapping ``pool_size`` blocks and averages the block maxima.
    """

    depthwise_kernel: np.ndarray = field(default_factory=lambda: LAPLACIAN.copy())
    pool_size: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "depthwise_kernel", as_kernel(self.depthwise_kernel))
        if self.pool_size is not None and (int(self.pool_size) != self.pool_size or self.pool_size < 1):
            raise ValueError("pool_size must be a positive integer or None")


def relu(x):
    """Rectified linear unit; works on scalars and arrays."""
    if np.isscalar(x):
        if not np.isfinite(x):
            raise ValueError("relu input must be finite")
        return float(x) if x > 0 else 0.0
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def _max_pool(response, pool_size):
    if pool_size is None:
        return float(response.max())
    h, w = response.shape
    maxima = []
    for y in range(0, h, pool_size):
        for x in range(0, w, pool_size):
            maxima.append(response[y:y + pool_size, x:x + pool_size].max())
    return float(np.mean(maxima))


def channel_responses(image, cfg=None) -> np.ndarray:
    cfg = cfg or AttentionConfig()
    img = as_raster(image, channels=3)
    return np.array([
        _max_pool(relu(convolve2d(img[:, :, c], cfg.depthwise_kernel)), cfg.pool_size)
        for c in range(3)
    ])


def channel_weights(image, cfg=None) -> np.ndarray:
    """Convex per-channel weights; uniform when no channel responds."""
    r = channel_responses(image, cfg)
    total = r.sum()
    if total <= 0:
        return np.full(3, 1.0 / 3.0)
    return r / total


def fuse(image, cfg=None, weights=None) -> np.ndarray:
    """Weighted channel sum, clamped to [0, 255].

    ``weights`` bypasses the attention block (e.g. ``(1/3, 1/3, 1/3)`` for
    plain luma).
    """
    img = as_raster(image, channels=3)
    w = channel_weights(img, cfg) if weights is None else np.asarray(weights, dtype=np.float64)
    if w.shape != (3,):
        raise ValueError("weights must have length 3")
    return clamp(np.tensordot(img, w, axes=([2], [0])))
