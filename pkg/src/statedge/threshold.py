"""Otsu threshold selection and three-way dual-threshold labelling."""

from dataclasses import dataclass

import numpy as np

STRONG_EDGE = "strong_edge"
CANDIDATE = "candidate"
NOISE = "noise"


@dataclass(frozen=True)
class DualThreshold:
    t_star: int
    t_high: int
    t_low: int

    def __post_init__(self):
        if not 0 <= self.t_low <= self.t_high <= 255:
            raise ValueError("need 0 <= t_low <= t_high <= 255")


def histogram256(values) -> np.ndarray:
    """Counts of 8-bit levels; values are rounded and clipped to [0, 255]."""
    q = np.clip(np.rint(np.asarray(values, dtype=np.float64)), 0, 255).astype(np.int64)
    return np.bincount(q.ravel(), minlength=256)


def _check_hist(hist):
    h = np.asarray(hist)
    if h.shape != (256,):
        raise ValueError("histogram must have 256 bins")
    if np.any(h < 0):
        raise ValueError("histogram counts must be non-negative")
    if h.sum() <= 0:
        raise ValueError("histogram is empty")
    return h


def class_statistics(hist):
    """Per-threshold ``(w0, w1, mu0, mu1, mu_total)`` arrays.

    Background is levels ``<= T``, foreground ``> T``. Means of empty
    classes are reported as 0.
    """
    h = _check_hist(hist)
    total = float(h.sum())
    levels = np.arange(256)
    n0 = np.cumsum(h)
    n1 = h.sum() - n0
    s0 = np.cumsum(levels * h).astype(np.float64)
    s1 = s0[-1] - s0
    w0 = n0 / total
    w1 = n1 / total
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = np.where(n0 > 0, s0 / n0, 0.0)
        mu1 = np.where(n1 > 0, s1 / n1, 0.0)
    return w0, w1, mu0, mu1, s0[-1] / total


def between_class_variance(hist) -> np.ndarray:
    w0, w1, mu0, mu1, _ = class_statistics(hist)
    return w0 * w1 * (mu0 - mu1) ** 2


def otsu(hist) -> int:
    """Smallest threshold maximizing the between-class variance.

    The comparison is carried out in exact integer arithmetic on
    ``(s0 n1 - s1 n0)^2 / (n0 n1)``, which is proportional to the
    between-class variance, so plateaus resolve to their first level.
    """
    h = [int(v) for v in _check_hist(hist)]
    total = sum(h)
    total_sum = sum(i * v for i, v in enumerate(h))
    n0 = s0 = 0
    best_t, best_num, best_den = 0, 0, 1
    for t in range(256):
        n0 += h[t]
        s0 += t * h[t]
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            continue
        num = (s0 * n1 - (total_sum - s0) * n0) ** 2
        den = n0 * n1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def dual_thresholds(hist, ratio=0.5) -> DualThreshold:
    if not 0 < ratio <= 1:
        raise ValueError("ratio must lie in (0, 1]")
    t = otsu(hist)
    return DualThreshold(t_star=t, t_high=t, t_low=int(np.floor(ratio * t + 0.5)))


def classify_pixel(v, dt: DualThreshold) -> str:
    if not 0 <= v <= 255:
        raise ValueError("intensity must lie in [0, 255]")
    if v > dt.t_high:
        return STRONG_EDGE
    if v > dt.t_low:
        return CANDIDATE
    return NOISE


def classify_array(values, dt: DualThreshold):
    """Boolean ``(strong, candidate)`` masks; everything else is noise."""
    v = np.asarray(values)
    strong = v > dt.t_high
    candidate = (v > dt.t_low) & ~strong
    return strong, candidate
