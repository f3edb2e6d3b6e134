"""
Displacement contingency tables and the 2x2 independence tests.

A point set is summarized by counting, over every unordered pair of points,
whether the horizontal and vertical displacements are within ``k``::

                  |dy| <= k   |dy| > k
    |dx| <= k        a           b
    |dx| >  k        c           d

Points lying along a curve make the two displacements move together, which
shows up as dependence in this table. Scattered points leave them
independent.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

CHI_SQUARE = "chi_square"
FISHER_EXACT = "fisher_exact"
FISHER_MODES = ("point", "one_tail", "two_tail")

# relative slack when comparing point probabilities in the two-sided rule
_TWO_TAIL_RTOL = 1e-7


@dataclass(frozen=True)
class ContingencyTable:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"cell {name} must be a non-negative integer, got {v}")
            object.__setattr__(self, name, int(v))

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d

    @property
    def rows(self) -> tuple:
        return self.a + self.b, self.c + self.d

    @property
    def cols(self) -> tuple:
        return self.a + self.c, self.b + self.d

    @property
    def cells(self) -> tuple:
        return self.a, self.b, self.c, self.d

    @property
    def degenerate(self) -> bool:
        return 0 in self.rows or 0 in self.cols

    @classmethod
    def parse(cls, text: str) -> "ContingencyTable":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("table must be given as a,b,c,d")
        return cls(*(int(p) for p in parts))


@dataclass(frozen=True)
class TestOutcome:
    method: str
    statistic: float | None
    p_value: float
    reject_h0: bool
    alpha: float
    degenerate: bool = False

    __test__ = False  # keep pytest from collecting this as a test class


def _pair_count_1d(coords, k):
    # unordered pairs whose coordinate difference is <= k
    coords = np.asarray(coords, dtype=np.int64)
    lo = coords.min()
    hist = np.bincount(coords - lo)
    csum = np.concatenate([[0], np.cumsum(hist)])
    idx = np.arange(hist.size)
    upper = np.minimum(idx + k + 1, hist.size)
    lower = np.maximum(idx - k, 0)
    near = csum[upper] - csum[lower]
    return int((np.dot(hist, near) - coords.size) // 2)


def _pair_count_box(xs, ys, k):
    # unordered pairs with |dx| <= k and |dy| <= k, via a summed-area table
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    x0, y0 = xs.min(), ys.min()
    w, h = xs.max() - x0 + 1, ys.max() - y0 + 1
    occ = np.zeros((h, w), dtype=np.int64)
    np.add.at(occ, (ys - y0, xs - x0), 1)
    sat = np.zeros((h + 1, w + 1), dtype=np.int64)
    sat[1:, 1:] = occ.cumsum(axis=0).cumsum(axis=1)
    r = np.arange(h)
    cc = np.arange(w)
    r1 = np.maximum(r - k, 0)[:, None]
    r2 = np.minimum(r + k + 1, h)[:, None]
    c1 = np.maximum(cc - k, 0)[None, :]
    c2 = np.minimum(cc + k + 1, w)[None, :]
    box = sat[r2, c2] - sat[r1, c2] - sat[r2, c1] + sat[r1, c1]
    return int((np.sum(occ * box) - xs.size) // 2)


def build_table(points, k=3) -> ContingencyTable:
    """Contingency table over all unordered pairs of ``points``.

    Counting goes through coordinate histograms rather than explicit pair
    enumeration, so the cost is linear in the bounding-box area; the counts
    are exact.

    Parameters
    ----------
    points : array_like, shape (m, 2)
        Integer ``(x, y)`` coordinates. Duplicates are allowed.
    k : int
        Displacement threshold, ``k >= 1``.
    """
    pts = np.asarray(points)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must have shape (m, 2)")
    if pts.shape[0] < 2:
        raise ValueError("at least two points are needed to form a pair")
    if k < 1 or int(k) != k:
        raise ValueError("k must be a positive integer")
    if not np.all(pts == np.round(pts)):
        raise ValueError("points must have integer coordinates")
    pts = pts.astype(np.int64)
    k = int(k)
    m = pts.shape[0]
    n = m * (m - 1) // 2
    near_x = _pair_count_1d(pts[:, 0], k)
    near_y = _pair_count_1d(pts[:, 1], k)
    a = _pair_count_box(pts[:, 0], pts[:, 1], k)
    b = near_x - a
    c = near_y - a
    return ContingencyTable(a, b, c, n - a - b - c)


def chi_square_sf(statistic: float) -> float:
    """Upper tail of the chi-square distribution with one degree of freedom."""
    if statistic <= 0:
        return 1.0
    return math.erfc(math.sqrt(statistic / 2.0))


def chi_square_test(table: ContingencyTable, yates=False, alpha=0.05) -> TestOutcome:
    t = table
    if t.degenerate:
        return TestOutcome(CHI_SQUARE, 0.0, 1.0, False, alpha, degenerate=True)
    n = t.n
    rows, cols = t.rows, t.cols
    observed = ((t.a, t.b), (t.c, t.d))
    stat = 0.0
    for i in range(2):
        for j in range(2):
            expected = rows[i] * cols[j] / n
            diff = abs(observed[i][j] - expected)
            if yates:
                diff = max(diff - 0.5, 0.0)
            stat += diff * diff / expected
    p = min(max(chi_square_sf(stat), 0.0), 1.0)
    return TestOutcome(CHI_SQUARE, stat, p, p < alpha, alpha)


def _hypergeom_support(t: ContingencyTable):
    r1, r2 = t.rows
    c1, _ = t.cols
    lo = max(0, c1 - r2)
    hi = min(r1, c1)
    return lo, hi


def _log_point_probs(t: ContingencyTable, a_values):
    # log P(A = a) for the tables sharing the margins of t
    r1, r2 = t.rows
    c1, c2 = t.cols
    n = t.n
    a = np.asarray(a_values, dtype=np.float64)
    const = (gammaln(r1 + 1) + gammaln(r2 + 1) + gammaln(c1 + 1) + gammaln(c2 + 1)
             - gammaln(n + 1))
    return const - (gammaln(a + 1) + gammaln(r1 - a + 1) + gammaln(c1 - a + 1)
                    + gammaln(r2 - c1 + a + 1))


def fisher_point_probability(table: ContingencyTable) -> float:
    """Hypergeometric probability of exactly the observed table."""
    return float(np.exp(_log_point_probs(table, [table.a])[0]))


def fisher_exact_test(table: ContingencyTable, mode="one_tail", alpha=0.05) -> TestOutcome:
    """Fisher's exact test on a 2x2 table.

    ``point`` returns the probability of the observed table alone.
    ``one_tail`` sums the tables at least as extreme in the direction the
    observed ``a`` departs from its expectation. ``two_tail`` sums every
    table no more probable than the observed one.
    """
    if mode not in FISHER_MODES:
        raise ValueError(f"mode must be one of {FISHER_MODES}")
    t = table
    if t.degenerate:
        return TestOutcome(FISHER_EXACT, None, 1.0, False, alpha, degenerate=True)
    lo, hi = _hypergeom_support(t)
    support = np.arange(lo, hi + 1)
    logp = _log_point_probs(t, support)
    obs = logp[t.a - lo]
    if mode == "point":
        p = math.exp(obs)
    elif mode == "one_tail":
        r1, _ = t.rows
        c1, _ = t.cols
        # compare a * n with r1 * c1 to avoid a float expectation
        if t.a * t.n >= r1 * c1:
            tail = logp[t.a - lo:]
        else:
            tail = logp[:t.a - lo + 1]
        p = _sum_exp(tail)
    else:
        keep = logp <= obs + math.log1p(_TWO_TAIL_RTOL)
        p = _sum_exp(logp[keep])
    p = min(max(p, 0.0), 1.0)
    return TestOutcome(FISHER_EXACT, None, p, p < alpha, alpha)


def _sum_exp(logs) -> float:
    if logs.size == 0:
        return 0.0
    top = logs.max()
    return float(math.exp(top) * np.sum(np.exp(logs - top)))


def independence_test(table: ContingencyTable, alpha=0.05, fisher_mode="one_tail",
                      yates=False) -> TestOutcome:
    """Fisher's exact test when any cell is below 5, chi-square otherwise."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if min(table.cells) < 5:
        return fisher_exact_test(table, fisher_mode, alpha)
    return chi_square_test(table, yates, alpha)
