"""
Monte Carlo size and power experiments for U_MW, JEL and AJEL.

Replication r draws its data from RngStream(seed, r), so a table depends only
on the configuration and never on the number of workers: chunks of
replications are merged back in replication order before aggregation.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Iterable

import numpy as np
import pandas as pd
from django.conf import settings

from prhr.asymptotic import umw_test
from prhr.choices import Alternative, ElRule, Method, Scenario
from prhr.distributions import (
    MAX_SEED,
    RngStream,
    sample_exponential,
    sample_frechet,
    sample_ged,
    sample_gumbel,
)
from prhr.exceptions import (
    ConfigurationError,
    DegenerateEstimateError,
    HullViolationError,
    NumericalFailureError,
)
from prhr.kernel import jackknife_pseudovalues, u_statistic
from prhr.likelihood import ajel_from_pseudovalues, jel_from_pseudovalues
from prhr.samples import Sample

logger = logging.getLogger("prhr")

TSV_COLUMNS = [
    "scenario",
    "param",
    "m",
    "n",
    "method",
    "alpha",
    "rejection_rate",
    "undefined_rate",
    "reps",
    "seed",
]

PRESET_SIZES = ((10, 10), (20, 20), (25, 20))
PRESET_ALPHAS = (0.01, 0.05, 0.10)
TABLE_PRESETS = {
    1: (Scenario.NULL_GED, (2.0, 4.0, 6.0)),
    2: (Scenario.FRECHET, (3.0, 5.0, 7.0)),
    3: (Scenario.GUMBEL, (3.0, 5.0, 7.0)),
}

# outcome columns: UMW p, JEL p, JEL sign, AJEL p, AJEL sign
_UMW_P, _JEL_P, _JEL_SIGN, _AJEL_P, _AJEL_SIGN = range(5)


@dataclass(frozen=True)
class SimConfig:
    """
    One cell of a simulation grid.

    `param` is theta (null-ged), alpha2 (frechet) or the Gumbel scale gamma;
    `baseline` is the exponential rate (null-ged, gumbel) or alpha1 (frechet).
    `reps` and `seed` fall back to settings.PRHR.
    """

    scenario: Scenario
    param: float
    m: int
    n: int
    reps: int | None = None
    alphas: tuple[float, ...] = PRESET_ALPHAS
    seed: int | None = None
    el_rule: ElRule = ElRule.GATED
    baseline: float = 1.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "scenario", Scenario(self.scenario))
            object.__setattr__(self, "el_rule", ElRule(self.el_rule))
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if self.reps is None:
            object.__setattr__(self, "reps", settings.PRHR["DEFAULT_REPS"])
        if self.seed is None:
            object.__setattr__(self, "seed", settings.PRHR["DEFAULT_SEED"])

        if self.reps < 1:
            raise ConfigurationError(f"reps must be at least 1, got {self.reps}")
        if self.m < 3 or self.n < 3:
            raise ConfigurationError(
                f"group sizes must be at least 3, got m={self.m}, n={self.n}"
            )
        if not self.alphas:
            raise ConfigurationError("at least one significance level is required")
        for alpha in self.alphas:
            if not 0.0 < alpha < 1.0:
                raise ConfigurationError(f"alpha must lie in (0, 1), got {alpha}")
        for name, value in (("param", self.param), ("baseline", self.baseline)):
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be positive, got {value}")
        if not 0 <= self.seed <= MAX_SEED:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def draw(self, rng: RngStream) -> tuple[Sample, Sample]:
        """X (size m) then Y (size n) from the same stream."""
        if self.scenario is Scenario.NULL_GED:
            x = sample_exponential(rng, self.baseline, self.m, label="x")
            y = sample_ged(rng, self.baseline, self.param, self.n, label="y")
        elif self.scenario is Scenario.FRECHET:
            # r_Y/r_X increases in t iff X's shape exceeds Y's
            x = sample_frechet(rng, self.param, self.m, label="x")
            y = sample_frechet(rng, self.baseline, self.n, label="y")
        else:
            # Y has scale gamma, F(x) = exp(-exp(-x / gamma)); r_Y/r_X then
            # increases in t for gamma > 1
            x = sample_exponential(rng, self.baseline, self.m, label="x")
            y = sample_gumbel(rng, 1.0 / self.param, self.n, label="y")
        return x, y


@dataclass(frozen=True)
class SimRow:
    scenario: Scenario
    param: float
    m: int
    n: int
    method: Method
    alpha: float
    rejection_rate: float
    undefined_rate: float
    reps: int
    seed: int


@dataclass
class SimTable:
    rows: list[SimRow] = field(default_factory=list)

    def extend(self, other: "SimTable") -> "SimTable":
        self.rows.extend(other.rows)
        return self

    def rate(self, method: Method, alpha: float, **match) -> float:
        """Rejection rate of the single row matching method, alpha and `match`."""
        found = [
            row
            for row in self.rows
            if row.method == method
            and math.isclose(row.alpha, alpha)
            and all(getattr(row, key) == value for key, value in match.items())
        ]
        if len(found) != 1:
            raise KeyError(f"{len(found)} rows match {method} at alpha={alpha} {match}")
        return found[0].rejection_rate

    def to_frame(self) -> pd.DataFrame:
        records = [
            {
                "scenario": str(row.scenario.value),
                "param": row.param,
                "m": row.m,
                "n": row.n,
                "method": str(row.method.value),
                "alpha": row.alpha,
                "rejection_rate": row.rejection_rate,
                "undefined_rate": row.undefined_rate,
                "reps": row.reps,
                "seed": str(row.seed),
            }
            for row in self.rows
        ]
        return pd.DataFrame.from_records(records, columns=TSV_COLUMNS)

    def to_tsv(self, float_format: str = "%.17g") -> str:
        return self.to_frame().to_csv(
            sep="\t", index=False, float_format=float_format, lineterminator="\n"
        )


def replicate(config: SimConfig, stream_id: int) -> np.ndarray:
    """
    p-values and U signs of the three tests on replication `stream_id`;
    NaN marks a degenerate method.
    """
    outcome = np.full(5, np.nan)
    x, y = config.draw(RngStream(config.seed, stream_id))
    summary = u_statistic(x, y)

    try:
        outcome[_UMW_P] = umw_test(x, y, Alternative.INCREASING, u=summary.u).p_value
    except DegenerateEstimateError:
        pass

    pseudo = jackknife_pseudovalues(summary, delta0=0.0)
    for build, p_col, sign_col in (
        (jel_from_pseudovalues, _JEL_P, _JEL_SIGN),
        (ajel_from_pseudovalues, _AJEL_P, _AJEL_SIGN),
    ):
        try:
            report = build(pseudo, summary.u, Alternative.INCREASING)
        except HullViolationError:
            continue
        except NumericalFailureError as exc:
            logger.warning(f"Replication {stream_id} of {config}: {exc}")
            continue
        outcome[p_col] = report.p_value
        outcome[sign_col] = report.direction_sign
    return outcome


def _run_chunk(config: SimConfig, start: int, stop: int) -> np.ndarray:
    return np.vstack([replicate(config, r) for r in range(start, stop)])


def _chunks(reps: int, workers: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil(reps / (workers * 4)))
    return [(start, min(start + size, reps)) for start in range(0, reps, size)]


def _aggregate(config: SimConfig, outcomes: np.ndarray) -> SimTable:
    table = SimTable()
    gate = config.el_rule is ElRule.GATED
    for method, p_col, sign_col in (
        (Method.UMW, _UMW_P, None),
        (Method.JEL, _JEL_P, _JEL_SIGN),
        (Method.AJEL, _AJEL_P, _AJEL_SIGN),
    ):
        p_values = outcomes[:, p_col]
        defined = ~np.isnan(p_values)
        n_defined = int(defined.sum())
        undefined_rate = 1.0 - n_defined / config.reps
        for alpha in config.alphas:
            rejected = defined & (p_values <= alpha)
            if sign_col is not None and gate:
                rejected &= outcomes[:, sign_col] == Alternative.INCREASING.sign
            rate = int(rejected.sum()) / n_defined if n_defined else 0.0
            table.rows.append(
                SimRow(
                    scenario=config.scenario,
                    param=config.param,
                    m=config.m,
                    n=config.n,
                    method=method,
                    alpha=alpha,
                    rejection_rate=rate,
                    undefined_rate=undefined_rate,
                    reps=config.reps,
                    seed=config.seed,
                )
            )
        if undefined_rate:
            logger.warning(
                f"{method} undefined on {config.reps - n_defined} of {config.reps} "
                f"replications ({config.scenario}, param={config.param}, "
                f"m={config.m}, n={config.n})"
            )
    return table


def run_simulation(config: SimConfig, max_workers: int = 1) -> SimTable:
    """Replications in parallel chunks, merged in replication order."""
    workers = max(1, min(int(max_workers), config.reps))
    logger.info(
        f"Simulating {config.scenario} param={config.param} m={config.m} n={config.n} "
        f"reps={config.reps} on {workers} worker(s)"
    )
    if workers == 1:
        outcomes = _run_chunk(config, 0, config.reps)
    else:
        bounds = _chunks(config.reps, workers)
        with ProcessPoolExecutor(max_workers=workers) as executor:
            parts = executor.map(
                partial(_run_chunk, config),
                [start for start, _ in bounds],
                [stop for _, stop in bounds],
            )
            outcomes = np.vstack(list(parts))
    return _aggregate(config, outcomes)


def run_type1(config: SimConfig, max_workers: int = 1) -> SimTable:
    """Empirical size: X ~ exponential(lambda), Y ~ GED(lambda, theta)."""
    if config.scenario is not Scenario.NULL_GED:
        raise ConfigurationError(
            f"Type I error runs use the {Scenario.NULL_GED} scenario, got {config.scenario}"
        )
    return run_simulation(config, max_workers)


def run_power(config: SimConfig, max_workers: int = 1) -> SimTable:
    """Empirical power under the Frechet or Gumbel alternative."""
    if config.scenario not in (Scenario.FRECHET, Scenario.GUMBEL):
        raise ConfigurationError(
            f"Power runs use the frechet or gumbel scenario, got {config.scenario}"
        )
    return run_simulation(config, max_workers)


def run_grid(
    scenario: Scenario,
    params: Iterable[float],
    sizes: Iterable[tuple[int, int]],
    reps: int | None = None,
    alphas: Iterable[float] = PRESET_ALPHAS,
    seed: int | None = None,
    el_rule: ElRule = ElRule.GATED,
    max_workers: int = 1,
) -> SimTable:
    """Every (param, (m, n)) cell with the same master seed."""
    scenario = Scenario(scenario)
    runner = run_type1 if scenario is Scenario.NULL_GED else run_power
    table = SimTable()
    alphas = tuple(alphas)
    for param in params:
        for m, n in sizes:
            config = SimConfig(
                scenario=scenario,
                param=float(param),
                m=int(m),
                n=int(n),
                reps=reps,
                alphas=alphas,
                seed=seed,
                el_rule=el_rule,
            )
            table.extend(runner(config, max_workers))
    return table
