"""
Normal-approximation test based on U (U_MW).

Under H0: F = F0^theta, the null variance components sigma10^2(theta) and
sigma01^2(theta) are closed-form; theta is estimated from the Mann-Whitney
probability tau = P(X < Y) = theta / (1 + theta) unless supplied.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from prhr.choices import Alternative
from prhr.exceptions import DegenerateEstimateError, DomainError, InsufficientDataError
from prhr.kernel import u_statistic_value
from prhr.samples import Sample

logger = logging.getLogger("prhr")


@dataclass(frozen=True)
class MwEstimate:
    tau: float
    theta: float | None

    @property
    def defined(self) -> bool:
        return self.theta is not None


@dataclass(frozen=True)
class UmwReport:
    statistic: float
    p_value: float
    sigma10_sq: float
    sigma01_sq: float
    theta_used: float
    u: float
    alternative: Alternative


def normal_upper_tail(z: float) -> float:
    """P(Z > z) through the complementary error function."""
    return float(special.ndtr(-z))


def tau_hat(x: Sample, y: Sample) -> float:
    """(1/mn) * #{(i, j): x_i < y_j}, strict."""
    below = np.searchsorted(x.values, y.values, side="left")
    return float(below.sum()) / (x.m * y.m)


def theta_hat(tau: float) -> float | None:
    """tau / (1 - tau); None when tau = 1, where the estimate is undefined."""
    if not 0.0 <= tau <= 1.0:
        raise DomainError(f"tau must lie in [0, 1], got {tau}")
    if tau == 1.0:
        return None
    return tau / (1.0 - tau)


def mw_estimate(x: Sample, y: Sample) -> MwEstimate:
    tau = tau_hat(x, y)
    return MwEstimate(tau=tau, theta=theta_hat(tau))


def _check_theta(theta: float) -> None:
    if not (math.isfinite(theta) and theta > 0):
        raise DomainError(f"theta must be a positive finite number, got {theta}")


def sigma10_null(theta: float) -> float:
    _check_theta(theta)
    t = theta
    bracket = (
        1.0
        - 1.0 / ((2 * t + 1) * (t + 1) ** 2)
        - 8 * t / (3 * t + 2)
        + 16 * t**2 / ((4 * t + 3) * (2 * t + 1))
    )
    return bracket / (4 * (2 * t + 1))


def sigma01_null(theta: float) -> float:
    _check_theta(theta)
    t = theta
    bracket = (
        1.0
        - 8.0 / (3 + 2 * t)
        + 16.0 / ((4 + 3 * t) * (2 + t))
        - t**3 / ((2 + t) * (t + 1) ** 2)
    )
    return t * bracket / (4 * (2 + t))


def kernel_projection_y(f_y, theta: float):
    """
    E{phi(X1, X2, Y1, Y2) | Y1} under H0 as a function of F(Y1).

    Its variance over Y1 is sigma01^2(theta); F(Y1) is uniform under H0.
    """
    _check_theta(theta)
    f_y = np.asarray(f_y, dtype=np.float64)
    return 0.5 * (
        theta**2 / ((2 + theta) * (1 + theta))
        - f_y ** (1.0 / theta)
        + 4.0 / (2 + theta) * f_y ** (1.0 + 2.0 / theta)
    )


def umw_test(
    x: Sample,
    y: Sample,
    alternative: Alternative = Alternative.INCREASING,
    theta: float | None = None,
    u: float | None = None,
) -> UmwReport:
    """
    U / (2 sqrt(sigma10^2(theta)/m + sigma01^2(theta)/n)) with a one-sided
    normal p-value: upper tail for H1, lower tail for H1'.

    `theta` pins the null resilience parameter; otherwise it is estimated.
    `u` lets callers that already enumerated the kernel skip the recount.
    """
    if x.m < 2 or y.m < 2:
        raise InsufficientDataError(
            f"U_MW needs at least 2 observations per group (m={x.m}, n={y.m})"
        )
    alternative = Alternative(alternative)
    if theta is None:
        estimate = mw_estimate(x, y)
        if estimate.tau in (0.0, 1.0):
            raise DegenerateEstimateError(
                f"Mann-Whitney estimate tau={estimate.tau:g}; theta cannot be "
                f"plugged into the null variance"
            )
        theta = estimate.theta
    else:
        _check_theta(theta)

    if u is None:
        u = u_statistic_value(x, y)

    s10 = sigma10_null(theta)
    s01 = sigma01_null(theta)
    statistic = u / (2.0 * math.sqrt(s10 / x.m + s01 / y.m))
    if alternative is Alternative.INCREASING:
        p_value = normal_upper_tail(statistic)
    else:
        p_value = normal_upper_tail(-statistic)

    return UmwReport(
        statistic=statistic,
        p_value=p_value,
        sigma10_sq=s10,
        sigma01_sq=s01,
        theta_used=theta,
        u=u,
        alternative=alternative,
    )
