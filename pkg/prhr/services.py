import logging
from dataclasses import dataclass, field

from django.conf import settings

from prhr.asymptotic import mw_estimate, umw_test
from prhr.choices import Alternative, ElRule, Method, Scenario
from prhr.exceptions import (
    DegenerateEstimateError,
    HullViolationError,
    InsufficientDataError,
)
from prhr.kernel import jackknife_pseudovalues, u_statistic
from prhr.likelihood import ajel_from_pseudovalues, jel_from_pseudovalues
from prhr.samples import LogLogSeries, Sample, loglog_series
from prhr.simulation import PRESET_ALPHAS, PRESET_SIZES, TABLE_PRESETS, SimTable, run_grid

logger = logging.getLogger("prhr")


@dataclass(frozen=True)
class MethodResult:
    method: Method
    statistic: float | None
    p_value: float | None
    decision: str
    degenerate: bool
    detail: str = ""


@dataclass(frozen=True)
class TestReport:
    m: int
    n: int
    tau_hat: float
    theta_hat: float | None
    u_value: float
    alternative: Alternative
    alpha: float
    el_rule: ElRule
    methods: dict[str, MethodResult] = field(default_factory=dict)


REJECT = "reject"
FAIL_TO_REJECT = "fail-to-reject"
UNDEFINED = "undefined"


def _degenerate(method: Method, detail: str) -> MethodResult:
    return MethodResult(
        method=method,
        statistic=None,
        p_value=None,
        decision=UNDEFINED,
        degenerate=True,
        detail=detail,
    )


class PrhrTestService:
    """
    Service responsible for:
    - One pass of the kernel enumeration over the (X, Y) pair.
    - Running U_MW, JEL and AJEL on it.
    - Turning each p-value into a decision at the requested alpha.

    Degenerate methods come back in-band; numerical failures propagate.
    """

    def run(
        self,
        x: Sample,
        y: Sample,
        alternative: Alternative = Alternative.INCREASING,
        alpha: float = 0.05,
        theta: float | None = None,
        el_rule: ElRule = ElRule.GATED,
    ) -> TestReport:
        alternative = Alternative(alternative)
        el_rule = ElRule(el_rule)
        summary = u_statistic(x, y)
        estimate = mw_estimate(x, y)
        logger.debug(
            f"m={x.m} n={y.m} u={summary.u!r} tau={estimate.tau!r} theta={estimate.theta!r}"
        )

        methods = {
            Method.UMW.value: self._umw(x, y, alternative, alpha, theta, summary.u),
        }
        methods.update(self._el(summary, alternative, alpha, el_rule))

        return TestReport(
            m=x.m,
            n=y.m,
            tau_hat=estimate.tau,
            theta_hat=estimate.theta,
            u_value=summary.u,
            alternative=alternative,
            alpha=alpha,
            el_rule=el_rule,
            methods=methods,
        )

    @staticmethod
    def _umw(x, y, alternative, alpha, theta, u) -> MethodResult:
        try:
            report = umw_test(x, y, alternative, theta=theta, u=u)
        except DegenerateEstimateError as exc:
            return _degenerate(Method.UMW, str(exc))
        return MethodResult(
            method=Method.UMW,
            statistic=report.statistic,
            p_value=report.p_value,
            decision=REJECT if report.p_value <= alpha else FAIL_TO_REJECT,
            degenerate=False,
        )

    @staticmethod
    def _el(summary, alternative, alpha, el_rule) -> dict[str, MethodResult]:
        try:
            pseudo = jackknife_pseudovalues(summary, delta0=0.0)
        except InsufficientDataError as exc:
            return {
                Method.JEL.value: _degenerate(Method.JEL, str(exc)),
                Method.AJEL.value: _degenerate(Method.AJEL, str(exc)),
            }

        results = {}
        for method, build in (
            (Method.JEL, jel_from_pseudovalues),
            (Method.AJEL, ajel_from_pseudovalues),
        ):
            try:
                report = build(pseudo, summary.u, alternative)
            except HullViolationError as exc:
                results[method.value] = _degenerate(method, str(exc))
                continue
            results[method.value] = MethodResult(
                method=method,
                statistic=report.statistic,
                p_value=report.p_value,
                decision=REJECT if report.rejects(alpha, el_rule) else FAIL_TO_REJECT,
                degenerate=False,
            )
        return results


class LogLogService:
    def build(self, x: Sample, y: Sample) -> list[LogLogSeries]:
        return [loglog_series(x), loglog_series(y)]


class SimulationService:
    """
    Service responsible for:
    - Expanding a numbered table preset or explicit grid into simulation cells.
    - Running every cell with the same master seed.
    """

    def __init__(self, max_workers: int | None = None) -> None:
        self.max_workers = max_workers or settings.PRHR.get("MAX_WORKERS", 1)

    def run_table(
        self,
        table: int,
        reps: int,
        seed: int,
        el_rule: ElRule = ElRule.GATED,
        alphas: tuple[float, ...] = PRESET_ALPHAS,
    ) -> SimTable:
        scenario, params = TABLE_PRESETS[table]
        return self.run(scenario, params, PRESET_SIZES, reps, alphas, seed, el_rule)

    def run(
        self,
        scenario: Scenario,
        params,
        sizes,
        reps: int,
        alphas,
        seed: int,
        el_rule: ElRule = ElRule.GATED,
    ) -> SimTable:
        return run_grid(
            scenario=scenario,
            params=params,
            sizes=sizes,
            reps=reps,
            alphas=alphas,
            seed=seed,
            el_rule=el_rule,
            max_workers=self.max_workers,
        )
