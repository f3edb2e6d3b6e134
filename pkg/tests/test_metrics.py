import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from statedge.metrics import f_measure, match_counts, mse, psnr, psnr_from_mse


def test_mse_examples():
    a = np.array([[1.0, 5.0], [9.0, 0.0]])
    assert mse(a, a) == 0
    assert mse(a + 2, a) == 4
    assert mse(np.full((3, 3), 255.0), np.zeros((3, 3))) == 65025


def test_psnr_examples():
    assert psnr(np.full((3, 3), 255.0), np.zeros((3, 3))) == 0.0
    a = np.ones((4, 4))
    assert math.isinf(psnr(a, a))
    assert psnr_from_mse(4.209) == pytest.approx(10 * math.log10(65025 / 4.209), rel=1e-12)
    assert psnr_from_mse(4.209) == pytest.approx(41.89, abs=5e-3)


def test_psnr_strictly_decreasing():
    values = np.linspace(0.01, 65025, 500)
    out = [psnr_from_mse(v) for v in values]
    assert all(x > y for x, y in zip(out, out[1:]))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        mse(np.zeros((2, 2)), np.zeros((2, 3)))
    with pytest.raises(ValueError):
        f_measure(np.zeros((2, 2), bool), np.zeros((3, 2), bool))


def test_identical_maps_score_one(rng):
    gt = rng.random((20, 20)) < 0.2
    r = f_measure(gt, gt)
    assert (r.precision, r.recall, r.f_measure) == (1.0, 1.0, 1.0)
    assert r.mse == 0 and math.isinf(r.psnr)
    empty = np.zeros((5, 5), bool)
    assert f_measure(empty, empty).f_measure == 1.0


def test_empty_prediction():
    gt = np.zeros((6, 6), bool)
    gt[2, 3] = True
    r = f_measure(np.zeros_like(gt), gt)
    assert (r.precision, r.recall, r.f_measure) == (0.0, 0.0, 0.0)


def test_single_pixel_tolerance():
    gt = np.zeros((10, 10), bool)
    pred = np.zeros((10, 10), bool)
    gt[5, 5] = True
    pred[6, 6] = True
    r = f_measure(pred, gt, tol=2)
    assert r.tp == 1 and r.f_measure == 1.0
    assert f_measure(pred, gt, tol=0).f_measure == 0.0
    assert f_measure(pred, gt, tol=1).f_measure == 1.0


def test_matching_is_one_to_one():
    gt = np.zeros((8, 8), bool)
    gt[4, 4] = True
    pred = np.zeros((8, 8), bool)
    pred[3, 3] = pred[4, 5] = True
    assert match_counts(pred, gt, 2) == (1, 1, 0)


def test_greedy_visits_predictions_row_major():
    # the first prediction in row-major order takes the only ground-truth pixel
    gt = np.zeros((5, 5), bool)
    gt[2, 2] = True
    pred = np.zeros((5, 5), bool)
    pred[1, 2] = pred[2, 2] = True
    assert match_counts(pred, gt, 1) == (1, 1, 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 3))
def test_matching_properties(seed, tol):
    rng = np.random.default_rng(seed)
    pred = rng.random((15, 15)) < 0.15
    gt = rng.random((15, 15)) < 0.15
    tp, fp, fn = match_counts(pred, gt, tol)
    assert tp <= min(pred.sum(), gt.sum())
    assert tp + fp == pred.sum() and tp + fn == gt.sum()
    if tol == 0:
        a, b = f_measure(pred, gt, 0), f_measure(gt, pred, 0)
        assert a.precision == b.recall and a.recall == b.precision
        assert a.f_measure == pytest.approx(b.f_measure, abs=1e-15)


def test_mse_scaled():
    pred = np.zeros((10, 100), bool)
    pred[0, :4] = True
    r = f_measure(pred, np.zeros_like(pred))
    assert r.mse == pytest.approx(65025 * 4 / 1000)
    assert r.mse_scaled == pytest.approx(4.0)
