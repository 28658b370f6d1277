"""
Jackknife empirical likelihood (JEL) and its adjusted variant (AJEL).

Both maximise prod(N p_i) over probability vectors with a zero weighted mean
of the centered pseudo-values w_i = V_i - E V_i. The Lagrange multiplier
solves sum w_i / (1 + lambda w_i) = 0 and -2 log R = 2 sum log(1 + lambda w_i),
calibrated against chi-square with one degree of freedom.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings
from django.core.exceptions import ImproperlyConfigured
from scipy import optimize

from prhr.asymptotic import normal_upper_tail
from prhr.choices import Alternative, ElRule, Method
from prhr.exceptions import HullViolationError, NumericalFailureError
from prhr.kernel import PseudoValues, UStatSummary, jackknife_pseudovalues, u_statistic
from prhr.samples import Sample

logger = logging.getLogger("prhr")

NEWTON_POLISH_STEPS = 20


def _solver_settings() -> tuple[int, float]:
    try:
        config = settings.PRHR
    except (ImproperlyConfigured, AttributeError):
        config = {}
    return config.get("SOLVER_MAX_ITER", 200), config.get("SOLVER_RESIDUAL_TOL", 1e-10)


@dataclass(frozen=True, eq=False)
class ElSolution:
    lam: float
    weights: np.ndarray
    neg2logr: float
    converged: bool
    residual: float


@dataclass(frozen=True)
class ElReport:
    statistic: float
    p_value: float
    direction_sign: int
    method: Method
    alternative: Alternative
    lam: float

    def rejects(self, alpha: float, rule: ElRule = ElRule.GATED) -> bool:
        """p <= alpha, and under the gated rule sign(u) must match the alternative."""
        if self.p_value > alpha:
            return False
        if ElRule(rule) is ElRule.CHI2:
            return True
        return self.direction_sign == self.alternative.sign


def chi2_1_upper_tail(statistic: float) -> float:
    """P(chi2_1 > s) = 2 P(Z > sqrt(s))."""
    return min(1.0, 2.0 * normal_upper_tail(math.sqrt(max(statistic, 0.0))))


def adjustment_level(pooled: int) -> float:
    """a_N = max(1, log(N) / 2), natural log."""
    return max(1.0, math.log(pooled) / 2.0)


def solve_lambda(w) -> ElSolution:
    """
    Lagrange multiplier of the empirical-likelihood mean constraint.

    Every p_i <= 1 at the solution, so 1 + lambda w_i >= 1/N and the root lies
    in [(1/N - 1)/max w, (1/N - 1)/min w]. The score is strictly decreasing
    there; Brent's method brackets the root and Newton steps polish it.
    """
    w = np.asarray(w, dtype=np.float64).ravel()
    if w.size == 0:
        raise ValueError("solve_lambda needs at least one value")
    pooled = w.size
    max_iter, residual_tol = _solver_settings()

    if not np.any(w):
        weights = np.full(pooled, 1.0 / pooled)
        return ElSolution(
            lam=0.0, weights=weights, neg2logr=0.0, converged=True, residual=0.0
        )

    w_min, w_max = float(w.min()), float(w.max())
    if not (w_min < 0.0 < w_max):
        raise HullViolationError(
            f"Zero is outside the convex hull of the centered pseudo-values "
            f"(min={w_min:.6g}, max={w_max:.6g})"
        )

    def score(lam: float) -> float:
        return float(np.sum(w / (1.0 + lam * w)))

    lower = (1.0 / pooled - 1.0) / w_max
    upper = (1.0 / pooled - 1.0) / w_min
    score_lower, score_upper = score(lower), score(upper)
    logger.debug(
        f"EL bracket [{lower:.6g}, {upper:.6g}] scores ({score_lower:.3g}, {score_upper:.3g})"
    )

    if score_lower <= 0.0:
        lam = lower
    elif score_upper >= 0.0:
        lam = upper
    else:
        try:
            lam = optimize.brentq(
                score,
                lower,
                upper,
                xtol=1e-15,
                rtol=4 * np.finfo(float).eps,
                maxiter=max_iter,
            )
        except RuntimeError as exc:
            raise NumericalFailureError(f"Lagrange multiplier search failed: {exc}") from exc

    tolerance = residual_tol * pooled * float(np.max(np.abs(w)))
    current = score(lam)
    for _ in range(NEWTON_POLISH_STEPS):
        if abs(current) <= tolerance:
            break
        slope = -float(np.sum(w**2 / (1.0 + lam * w) ** 2))
        candidate = lam - current / slope
        if not lower <= candidate <= upper:
            break
        candidate_score = score(candidate)
        if abs(candidate_score) >= abs(current):
            break
        lam, current = candidate, candidate_score

    shifted = 1.0 + lam * w
    weights = 1.0 / (pooled * shifted)
    neg2logr = max(0.0, 2.0 * float(np.sum(np.log1p(lam * w))))
    return ElSolution(
        lam=float(lam),
        weights=weights,
        neg2logr=neg2logr,
        converged=bool(abs(current) <= tolerance),
        residual=abs(current),
    )


def _report(
    solution: ElSolution, u: float, method: Method, alternative: Alternative
) -> ElReport:
    if not solution.converged:
        raise NumericalFailureError(
            f"{method} Lagrange multiplier residual {solution.residual:.3g} above tolerance"
        )
    return ElReport(
        statistic=solution.neg2logr,
        p_value=chi2_1_upper_tail(solution.neg2logr),
        direction_sign=int(np.sign(u)),
        method=method,
        alternative=Alternative(alternative),
        lam=solution.lam,
    )


def jel_from_pseudovalues(
    pseudo: PseudoValues, u: float, alternative: Alternative = Alternative.INCREASING
) -> ElReport:
    try:
        solution = solve_lambda(pseudo.centered)
    except HullViolationError as exc:
        raise HullViolationError(f"JEL undefined for this sample, use AJEL: {exc}") from exc
    return _report(solution, u, Method.JEL, alternative)


def ajel_from_pseudovalues(
    pseudo: PseudoValues, u: float, alternative: Alternative = Alternative.INCREASING
) -> ElReport:
    """
    Adds V_{N+1} = -(a_N / N) * sum(w_i) to the centered pseudo-values, which
    keeps zero inside the convex hull.
    """
    w = pseudo.centered
    pooled = w.size
    extra = -adjustment_level(pooled) / pooled * float(np.sum(w))
    solution = solve_lambda(np.append(w, extra))
    return _report(solution, u, Method.AJEL, alternative)


def _pseudovalues_at_null(
    x: Sample, y: Sample, summary: UStatSummary | None
) -> tuple[PseudoValues, float]:
    if summary is None:
        summary = u_statistic(x, y)
    return jackknife_pseudovalues(summary, delta0=0.0), summary.u


def jel_test(
    x: Sample,
    y: Sample,
    alternative: Alternative = Alternative.INCREASING,
    summary: UStatSummary | None = None,
) -> ElReport:
    """U_JEL = -2 log R(0) with its chi-square(1) p-value and the sign of U."""
    pseudo, u = _pseudovalues_at_null(x, y, summary)
    return jel_from_pseudovalues(pseudo, u, alternative)


def ajel_test(
    x: Sample,
    y: Sample,
    alternative: Alternative = Alternative.INCREASING,
    summary: UStatSummary | None = None,
) -> ElReport:
    """U_AJEL = -2 log R*(0) over the N+1 adjusted pseudo-values."""
    pseudo, u = _pseudovalues_at_null(x, y, summary)
    return ajel_from_pseudovalues(pseudo, u, alternative)
