"""
End-to-end edge detection with statistical denoising.

Stages, in order:

1. RGB input is fused to one channel by the attention block (or plain luma).
2. The fused image is median filtered to knock out impulse noise.
3. Sobel gradient, max normalization and sigmoid membership; the membership
   map is then closed with a 3x3 dilation/erosion pair.
4. Pixels with membership above 0.5 (gradient above the image median)
   become edge candidates.
5. The image is split into adaptive overlapping regions.
6. High-complexity regions keep all their candidates. Elsewhere, Otsu dual
   thresholds on the regional membership histogram split candidates into
   strong edges (kept), mid-band pixels (tested), and noise (dropped). The
   mid-band point set is kept only if its displacement table rejects
   independence, either in the region itself or, on a second try, in a
   ``wmax`` window around it.
7. Regional verdicts are merged into one boolean map.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import attention, imgcore
from .attention import AttentionConfig
from .gradient import GradientField, sobel
from .stats import build_table, independence_test
from .threshold import classify_array, dual_thresholds, histogram256, otsu
from .windows import HIGH, WindowConfig, partition

MERGE_RULES = ("any_retain", "majority")


@dataclass(frozen=True)
class PipelineConfig:
    filter_size: int = 5
    alpha: float = 0.05
    k: int = 3
    wmin: int = 8
    wmax: int = 64
    overlap: float = 0.2
    gradient_threshold: float = 0.7
    k_sigmoid: float = 5.0
    window_decay: float = 4.0
    window_mode: str = "intent"
    dual_ratio: float = 0.5
    n_min: int = 5
    merge_rule: str = "any_retain"
    attention_enabled: bool = True
    attention_cfg: AttentionConfig = field(default_factory=AttentionConfig)
    fisher_mode: str = "one_tail"
    yates: bool = False
    max_points: int = 2000
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.filter_size < 1 or self.filter_size % 2 == 0:
            raise ValueError("filter_size must be a positive odd integer")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.k_sigmoid > 0:
            raise ValueError("k_sigmoid must be positive")
        if not 0 < self.dual_ratio <= 1:
            raise ValueError("dual_ratio must lie in (0, 1]")
        if self.n_min < 2:
            raise ValueError("n_min must be >= 2")
        if self.merge_rule not in MERGE_RULES:
            raise ValueError(f"merge_rule must be one of {MERGE_RULES}")
        if self.max_points < 2:
            raise ValueError("max_points must be >= 2")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        self.window_config()  # validates the window fields

    def window_config(self) -> WindowConfig:
        return WindowConfig(self.wmin, self.wmax, self.window_decay, self.window_mode,
                            self.overlap, self.gradient_threshold)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


@dataclass
class Detection:
    """Edge map plus the intermediate maps that produced it."""

    edges: np.ndarray
    gray: np.ndarray
    field: GradientField
    membership: np.ndarray
    candidates: np.ndarray
    regions: list
    region_tests: int = 0


def to_gray(image, cfg: PipelineConfig) -> np.ndarray:
    img = imgcore.as_raster(image)
    if img.ndim == 2:
        return img
    if cfg.attention_enabled:
        return attention.fuse(img, cfg.attention_cfg)
    return imgcore.luma(img)


def add_gaussian_noise(image, sigma, seed=0) -> np.ndarray:
    """I.i.d. zero-mean Gaussian noise, clamped to [0, 255]."""
    if not sigma >= 0 or not math.isfinite(sigma):
        raise ValueError("sigma must be a finite non-negative number")
    img = imgcore.as_raster(image)
    if sigma == 0:
        return img.copy()
    rng = np.random.default_rng(seed)
    return imgcore.clamp(img + rng.normal(0.0, sigma, size=img.shape))


def _quantize(membership):
    return np.clip(np.rint(membership * 255.0), 0, 255).astype(np.int64)


def _region_rng(cfg, r):
    return np.random.default_rng([cfg.seed, r.x0, r.y0, r.w, r.h])


def _points(mask, x_off, y_off):
    ys, xs = np.nonzero(mask)
    return np.column_stack([xs + x_off, ys + y_off])


def _rejects(points, cfg, rng) -> bool:
    if len(points) < cfg.n_min:
        return False
    if len(points) > cfg.max_points:
        keep = np.sort(rng.choice(len(points), cfg.max_points, replace=False))
        points = points[keep]
    table = build_table(points, cfg.k)
    return independence_test(table, cfg.alpha, cfg.fisher_mode, cfg.yates).reject_h0


class _RegionJudge:
    """Per-region keep/drop decision over shared, read-only maps."""

    def __init__(self, quantized, candidates, global_dt, cfg):
        self.q = quantized
        self.cand = candidates
        self.global_dt = global_dt
        self.cfg = cfg

    def __call__(self, r):
        cfg = self.cfg
        sy, sx = r.slices
        cand = self.cand[sy, sx]
        if not cand.any():
            return np.zeros_like(cand), 0
        if r.complexity == HIGH:
            return cand.copy(), 0

        q = self.q[sy, sx]
        hist = histogram256(q)
        dt = self.global_dt if np.count_nonzero(hist) < 2 else dual_thresholds(hist, cfg.dual_ratio)
        strong, mid = classify_array(q, dt)
        keep = cand & strong
        mid &= cand
        if not mid.any():
            return keep, 0

        rng = _region_rng(cfg, r)
        tests = 1
        if _rejects(_points(mid, r.x0, r.y0), cfg, rng):
            return keep | mid, tests

        if r.window_size < cfg.wmax:
            # second chance in a large window centred on the region
            height, width = self.q.shape
            side = cfg.wmax
            cx, cy = r.x0 + r.w // 2, r.y0 + r.h // 2
            x0 = min(max(cx - side // 2, 0), max(width - side, 0))
            y0 = min(max(cy - side // 2, 0), max(height - side, 0))
            big_q = self.q[y0:y0 + side, x0:x0 + side]
            _, big_mid = classify_array(big_q, dt)
            big_mid &= self.cand[y0:y0 + side, x0:x0 + side]
            tests += 1
            if len(np.flatnonzero(big_mid)) >= cfg.n_min and _rejects(
                    _points(big_mid, x0, y0), cfg, rng):
                return keep | mid, tests
        return keep, tests


def resolve_threads(threads=None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("STATEDGE_THREADS")
    return max(1, int(env)) if env else 1


def run(image, cfg=None, fixed_size=None) -> Detection:
    """Full detection, returning intermediate maps alongside the edges."""
    cfg = cfg or PipelineConfig()
    img = imgcore.as_raster(image)
    gray = to_gray(img, cfg)
    smoothed = imgcore.median_filter(gray, cfg.filter_size)
    fld = sobel(smoothed, cfg.k_sigmoid)
    memb = imgcore.close3x3(fld.membership)
    candidates = memb > 0.5

    regions = partition(fld.normalized, cfg.window_config(), fixed_size=fixed_size)
    quantized = _quantize(memb)
    global_dt = dual_thresholds(histogram256(quantized), cfg.dual_ratio)
    judge = _RegionJudge(quantized, candidates, global_dt, cfg)

    if cfg.threads > 1 and len(regions) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            verdicts = list(pool.map(judge, regions))
    else:
        verdicts = [judge(r) for r in regions]

    edges = merge(img.shape[:2], regions, [v[0] for v in verdicts], cfg.merge_rule)
    return Detection(
        edges=edges & candidates,
        gray=gray,
        field=fld,
        membership=memb,
        candidates=candidates,
        regions=regions,
        region_tests=sum(v[1] for v in verdicts),
    )


def merge(shape, regions, verdicts, rule="any_retain") -> np.ndarray:
    """Combine per-region keep masks; both rules are order independent."""
    if rule not in MERGE_RULES:
        raise ValueError(f"merge rule must be one of {MERGE_RULES}")
    if rule == "any_retain":
        out = np.zeros(shape, dtype=bool)
        for r, v in zip(regions, verdicts):
            out[r.slices] |= v
        return out
    kept = np.zeros(shape, dtype=np.int32)
    seen = np.zeros(shape, dtype=np.int32)
    for r, v in zip(regions, verdicts):
        kept[r.slices] += v
        seen[r.slices] += 1
    return 2 * kept > seen


def detect(image, cfg=None) -> np.ndarray:
    """Boolean edge map of ``image``."""
    return run(image, cfg).edges


def detect_fixed_window(image, cfg=None, fixed_size=8) -> np.ndarray:
    """Same as :func:`detect` but with one window side everywhere."""
    return run(image, cfg, fixed_size=fixed_size).edges


def sobel_otsu(image, cfg=None) -> np.ndarray:
    """Baseline: Otsu threshold on the 8-bit scaled Sobel magnitude."""
    cfg = cfg or PipelineConfig()
    fld = sobel(to_gray(image, cfg))
    q = _quantize(fld.normalized)
    if not q.any():
        return np.zeros(q.shape, dtype=bool)
    return q > otsu(histogram256(q))


def otsu_binarize(image, cfg=None) -> np.ndarray:
    """Baseline: Otsu foreground of the intensity image taken as the edge map."""
    cfg = cfg or PipelineConfig()
    gray = to_gray(image, cfg)
    hist = histogram256(gray)
    return np.rint(gray) > otsu(hist)


def with_overrides(cfg: PipelineConfig, **kwargs) -> PipelineConfig:
    return replace(cfg, **{k: v for k, v in kwargs.items() if v is not None})
