import numpy as np
import pytest


def brute_correlate(image, kernel, pad_mode="edge"):
    """Explicit-loop correlation used as an oracle for convolve2d."""
    kh, kw = kernel.shape
    cy, cx = kh // 2, kw // 2
    if pad_mode == "constant":
        padded = np.pad(image, ((cy, cy), (cx, cx)), mode="constant")
    else:
        padded = np.pad(image, ((cy, cy), (cx, cx)), mode=pad_mode)
    out = np.zeros_like(image, dtype=float)
    for y in range(image.shape[0]):
        for x in range(image.shape[1]):
            acc = 0.0
            for i in range(kh):
                for j in range(kw):
                    acc += kernel[i, j] * padded[y + i, x + j]
            out[y, x] = acc
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
