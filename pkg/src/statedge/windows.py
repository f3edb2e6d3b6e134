"""
Gradient-driven adaptive windows.

The image is first cut into a coarse grid of ``wmax``-sized cells. Each
cell's mean normalized gradient picks a window side through
:func:`window_size`; the cell is then tiled with overlapping windows of that
side. Busy cells get small windows, flat cells get one large window.
"""

import math
from dataclasses import dataclass

import numpy as np

LOW_MEDIUM = "low_medium"
HIGH = "high"
WINDOW_MODES = ("intent", "literal")


@dataclass(frozen=True)
class WindowConfig:
    wmin: int = 8
    wmax: int = 64
    decay: float = 4.0
    mode: str = "intent"
    overlap: float = 0.2
    gradient_threshold: float = 0.7

    def __post_init__(self):
        if not (isinstance(self.wmin, (int, np.integer)) and isinstance(self.wmax, (int, np.integer))):
            raise ValueError("wmin and wmax must be integers")
        if not 1 <= self.wmin < self.wmax:
            raise ValueError("need 1 <= wmin < wmax")
        if not self.decay > 0:
            raise ValueError("decay must be positive")
        if self.mode not in WINDOW_MODES:
            raise ValueError(f"mode must be one of {WINDOW_MODES}")
        if not 0 <= self.overlap < 1:
            raise ValueError("overlap must lie in [0, 1)")
        if not 0 <= self.gradient_threshold <= 1:
            raise ValueError("gradient_threshold must lie in [0, 1]")


@dataclass(frozen=True)
class RegionSpec:
    x0: int
    y0: int
    w: int
    h: int
    complexity: str
    mean_gradient: float
    window_size: int

    @property
    def slices(self):
        return slice(self.y0, self.y0 + self.h), slice(self.x0, self.x0 + self.w)


def window_size(g, wmin=8, wmax=64, decay=4.0, mode="intent") -> int:
    """Window side for a normalized gradient ``g`` in [0, 1].

    ``intent`` shrinks the window as the gradient grows,
    ``wmin + (wmax - wmin) * exp(-decay * g)``. ``literal`` uses
    ``wmin + (wmax - wmin) * (1 - exp(-decay * g))``, which grows instead.
    """
    if not (0.0 <= g <= 1.0):
        raise ValueError(f"g must lie in [0, 1], got {g}")
    if wmin >= wmax:
        raise ValueError("need wmin < wmax")
    if mode == "intent":
        w = wmin + (wmax - wmin) * math.exp(-decay * g)
    elif mode == "literal":
        w = wmin + (wmax - wmin) * (1.0 - math.exp(-decay * g))
    else:
        raise ValueError(f"mode must be one of {WINDOW_MODES}")
    return int(min(max(math.floor(w + 0.5), wmin), wmax))


def classify(mean_gradient, threshold=0.7) -> str:
    return HIGH if mean_gradient >= threshold else LOW_MEDIUM


def stride_for(size, overlap) -> int:
    return max(1, int(math.floor(size * (1.0 - overlap))))


def window_origins(start, length, size, stride) -> list:
    """Origins tiling ``[start, start + length)``; the last one touches the end."""
    if length <= size:
        return [start]
    last = start + length - size
    origins = list(range(start, last, stride))
    origins.append(last)
    return origins


def _tile(x_start, y_start, cw, ch, size, overlap, normalized, threshold):
    stride = stride_for(size, overlap)
    regions = []
    for y in window_origins(y_start, ch, size, stride):
        for x in window_origins(x_start, cw, size, stride):
            h = min(size, y_start + ch - y)
            w = min(size, x_start + cw - x)
            g = float(normalized[y:y + h, x:x + w].mean())
            regions.append(RegionSpec(x, y, w, h, classify(g, threshold), g, size))
    return regions


def partition(normalized, cfg=None, fixed_size=None) -> list:
    """Cover the image with overlapping analysis regions.

    Parameters
    ----------
    normalized : ndarray, shape (H, W)
        Normalized gradient magnitude in [0, 1].
    cfg : WindowConfig
    fixed_size : int, optional
        Tile the whole image with this one window side instead of adapting.

    Returns
    -------
    list of RegionSpec, cell by cell, row-major within each cell.
    """
    cfg = cfg or WindowConfig()
    g = np.asarray(normalized, dtype=np.float64)
    height, width = g.shape
    if fixed_size is not None:
        if fixed_size < 1:
            raise ValueError("fixed_size must be positive")
        return _tile(0, 0, width, height, int(fixed_size), cfg.overlap, g, cfg.gradient_threshold)

    regions = []
    cell = cfg.wmax
    for cy in range(0, height, cell):
        for cx in range(0, width, cell):
            ch = min(cell, height - cy)
            cw = min(cell, width - cx)
            cell_g = float(np.clip(g[cy:cy + ch, cx:cx + cw].mean(), 0.0, 1.0))
            size = window_size(cell_g, cfg.wmin, cfg.wmax, cfg.decay, cfg.mode)
            regions.extend(_tile(cx, cy, cw, ch, size, cfg.overlap, g, cfg.gradient_threshold))
    return regions


def coverage(shape, regions) -> np.ndarray:
    """Number of regions covering each pixel."""
    count = np.zeros(shape, dtype=np.int32)
    for r in regions:
        count[r.slices] += 1
    return count
