"""Edge-map scoring: MSE, PSNR, and tolerance-matched precision / recall / F."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

PEAK = 255.0


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    psnr: float
    precision: float
    recall: float
    f_measure: float
    tp: int
    fp: int
    fn: int

    @property
    def mse_scaled(self) -> float:
        """MSE of {0, 255} maps as mismatches per thousand pixels."""
        return self.mse / PEAK ** 2 * 1000.0


def _pair(pred, ref):
    p = np.asarray(pred, dtype=np.float64)
    r = np.asarray(ref, dtype=np.float64)
    if p.shape != r.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {r.shape}")
    return p, r


def mse(pred, ref) -> float:
    p, r = _pair(pred, ref)
    return float(np.mean((p - r) ** 2))


def psnr_from_mse(value) -> float:
    if value == 0:
        return math.inf
    return 10.0 * math.log10(PEAK ** 2 / value)


def psnr(pred, ref) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical inputs."""
    return psnr_from_mse(mse(pred, ref))


def _offsets(tol):
    offs = [(dy, dx) for dy in range(-tol, tol + 1) for dx in range(-tol, tol + 1)]
    # nearest first, row-major among equals
    offs.sort(key=lambda o: (max(abs(o[0]), abs(o[1])), o[0], o[1]))
    return offs


def match_counts(pred, gt, tol=2):
    """Greedy one-to-one matching within Chebyshev distance ``tol``.

    Predicted pixels are visited in row-major order; each takes the nearest
    still-unmatched ground-truth pixel. Returns ``(tp, fp, fn)``.
    """
    pm = np.asarray(pred, dtype=bool)
    gm = np.asarray(gt, dtype=bool)
    if pm.shape != gm.shape:
        raise ValueError(f"dimension mismatch: {pm.shape} vs {gm.shape}")
    if tol < 0:
        raise ValueError("tol must be >= 0")
    tol = int(tol)
    n_pred, n_gt = int(pm.sum()), int(gm.sum())
    if n_pred == 0 or n_gt == 0:
        return 0, n_pred, n_gt
    if tol == 0:
        tp = int(np.count_nonzero(pm & gm))
        return tp, n_pred - tp, n_gt - tp

    reachable = ndimage.maximum_filter(gm, size=2 * tol + 1, mode="constant", cval=0)
    free = gm.copy()
    h, w = gm.shape
    offs = _offsets(tol)
    tp = 0
    ys, xs = np.nonzero(pm & reachable)
    for y, x in zip(ys.tolist(), xs.tolist()):
        for dy, dx in offs:
            yy, xx = y + dy, x + dx
            if 0 <= yy < h and 0 <= xx < w and free[yy, xx]:
                free[yy, xx] = False
                tp += 1
                break
    return tp, n_pred - tp, n_gt - tp


def f_measure(pred, gt, tol=2) -> MetricsReport:
    """Precision, recall and F of a boolean edge map, plus MSE / PSNR on {0, 255}."""
    tp, fp, fn = match_counts(pred, gt, tol)
    if tp + fp + fn == 0:
        # both maps empty: perfect agreement
        precision = recall = f = 1.0
    else:
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    err = mse(np.asarray(pred, dtype=bool) * PEAK, np.asarray(gt, dtype=bool) * PEAK)
    return MetricsReport(err, psnr_from_mse(err), precision, recall, f, tp, fp, fn)
