"""Edge detection and denoising by adaptive-window statistical independence tests."""

from .pipeline import (
    PipelineConfig,
    add_gaussian_noise,
    detect,
    detect_fixed_window,
    otsu_binarize,
    run,
    sobel_otsu,
)
from .stats import ContingencyTable, build_table, independence_test

__version__ = "0.1.0"

__all__ = [
    "ContingencyTable",
    "PipelineConfig",
    "add_gaussian_noise",
    "build_table",
    "detect",
    "detect_fixed_window",
    "independence_test",
    "otsu_binarize",
    "run",
    "sobel_otsu",
]
