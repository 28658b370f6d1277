"""
Kernel, two-sample U-statistic and jackknife pseudo-values.

Kernel sums are kept in quarter units: 4*phi is the integer sum of the four
raw-kernel arrangements, so totals and per-index aggregates are exact and
floating point enters only when dividing by the number of quadruples.
"""

import logging
from dataclasses import dataclass
from math import comb

import numba
import numpy as np

from prhr.exceptions import InsufficientDataError
from prhr.samples import Sample

logger = logging.getLogger("prhr")


@numba.njit(cache=True)
def _raw_hits(x1, x2, y1, y2):
    hit = 0
    if x1 < y1 and y2 < x2 and x2 < y1:
        hit += 1
    if y1 < x1 and x2 < y2 and y2 < x1:
        hit -= 1
    return hit


@numba.njit(cache=True)
def _quarter_hits(x1, x2, y1, y2):
    return (
        _raw_hits(x1, x2, y1, y2)
        + _raw_hits(x2, x1, y1, y2)
        + _raw_hits(x1, x2, y2, y1)
        + _raw_hits(x2, x1, y2, y1)
    )


@numba.njit(cache=True)
def _enumerate_quadruples(x, y):
    m = x.shape[0]
    n = y.shape[0]
    per_index = np.zeros(m + n, dtype=np.int64)
    total = 0
    for i in range(m - 1):
        xi = x[i]
        for j in range(i + 1, m):
            xj = x[j]
            for k in range(n - 1):
                yk = y[k]
                for l in range(k + 1, n):
                    q = _quarter_hits(xi, xj, yk, y[l])
                    if q != 0:
                        total += q
                        per_index[i] += q
                        per_index[j] += q
                        per_index[m + k] += q
                        per_index[m + l] += q
    return total, per_index


def kernel_raw(x1: float, x2: float, y1: float, y2: float) -> int:
    """I(x1<y1, y2<x2<y1) - I(y1<x1, x2<y2<x1), strict inequalities."""
    return int(_raw_hits(float(x1), float(x2), float(y1), float(y2)))


def kernel_sym(x1: float, x2: float, y1: float, y2: float) -> float:
    """Average of the raw kernel over both x orders and both y orders."""
    return _quarter_hits(float(x1), float(x2), float(y1), float(y2)) / 4.0


@dataclass(frozen=True, eq=False)
class UStatSummary:
    """
    Kernel sums of one U-statistic pass.

    Pooled indices 0..m-1 are X (sorted order), m..m+n-1 are Y. Quantities
    ending in `_quarters` are exact integers equal to 4x the kernel sums.
    """

    total_quarters: int
    per_index_quarters: np.ndarray
    m: int
    n: int

    @property
    def quadruples(self) -> int:
        return comb(self.m, 2) * comb(self.n, 2)

    @property
    def total(self) -> float:
        return self.total_quarters / 4.0

    @property
    def per_index(self) -> np.ndarray:
        return self.per_index_quarters / 4.0

    @property
    def u(self) -> float:
        return self.total_quarters / (4.0 * self.quadruples)


def _require_pairs(m: int, n: int) -> None:
    if m < 2 or n < 2:
        raise InsufficientDataError(
            f"The U-statistic needs at least 2 observations per group (m={m}, n={n})"
        )


def u_statistic(x: Sample, y: Sample) -> UStatSummary:
    """
    One enumeration pass over all C(m,2)*C(n,2) quadruples.

    Each quadruple's kernel value is added to the total and to the aggregate
    of each of its four observations.
    """
    _require_pairs(x.m, y.m)
    total, per_index = _enumerate_quadruples(x.values, y.values)
    per_index.setflags(write=False)
    return UStatSummary(
        total_quarters=int(total), per_index_quarters=per_index, m=x.m, n=y.m
    )


def u_statistic_value(x: Sample, y: Sample) -> float:
    """
    U alone by rank counting in O((m+n) log(m+n)).

    With a(y) = #{X < y}, b(x) = #{Y < x}, B(y) = sum of b(X_j) over X_j < y
    and D(x) = sum of a(Y_l) over Y_l < x, the total in quarter units is
    sum_k (a(Y_k)-1) B(Y_k) - sum_i (b(X_i)-1) D(X_i).
    """
    _require_pairs(x.m, y.m)
    xs, ys = x.values, y.values
    a_y = np.searchsorted(xs, ys, side="left").astype(np.int64)
    b_x = np.searchsorted(ys, xs, side="left").astype(np.int64)
    prefix_b = np.concatenate(([0], np.cumsum(b_x)))
    prefix_a = np.concatenate(([0], np.cumsum(a_y)))
    upper = np.sum((a_y - 1) * prefix_b[a_y])
    lower = np.sum((b_x - 1) * prefix_a[b_x])
    total_quarters = int(upper - lower)
    return total_quarters / (4.0 * comb(x.m, 2) * comb(y.m, 2))


@dataclass(frozen=True, eq=False)
class PseudoValues:
    v: np.ndarray
    ev: np.ndarray
    delta0: float

    @property
    def centered(self) -> np.ndarray:
        return self.v - self.ev

    def __len__(self) -> int:
        return int(self.v.size)


def expected_pseudovalue_pair(m: int, n: int, delta):
    """
    (E V_i for an X index, E V_i for a Y index) at departure `delta`.

    Plain arithmetic, so a `fractions.Fraction` delta gives exact values.
    """
    if m + n <= 4:
        raise InsufficientDataError(f"Expected pseudo-values need m+n > 4 (m={m}, n={n})")
    pooled = m + n
    ex = delta * pooled * (2 * n - m - 2) / ((pooled - 4) * m)
    ey = delta * pooled * (2 * m - n - 2) / ((pooled - 4) * n)
    return ex, ey


def expected_pseudovalues(m: int, n: int, delta: float) -> np.ndarray:
    ex, ey = expected_pseudovalue_pair(m, n, float(delta))
    return np.concatenate((np.full(m, ex), np.full(n, ey)))


def jackknife_pseudovalues(summary: UStatSummary, delta0: float = 0.0) -> PseudoValues:
    """
    V_i = N*U - (N-1)*U^(-i) with N = m+n.

    The leave-one-out statistic reuses the per-index aggregates:
    U^(-i) = (total - S_i) / (number of quadruples without i).
    """
    m, n = summary.m, summary.n
    if m < 3 or n < 3:
        raise InsufficientDataError(
            f"Jackknife pseudo-values need at least 3 observations per group (m={m}, n={n})"
        )
    pooled = m + n
    without_x = 4.0 * comb(m - 1, 2) * comb(n, 2)
    without_y = 4.0 * comb(m, 2) * comb(n - 1, 2)
    remaining = summary.total_quarters - summary.per_index_quarters
    denominators = np.concatenate((np.full(m, without_x), np.full(n, without_y)))
    leave_one_out = remaining / denominators
    v = pooled * summary.u - (pooled - 1) * leave_one_out
    ev = expected_pseudovalues(m, n, delta0)
    v.setflags(write=False)
    ev.setflags(write=False)
    return PseudoValues(v=v, ev=ev, delta0=float(delta0))
