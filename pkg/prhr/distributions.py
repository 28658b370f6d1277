"""
Seeded inverse-transform samplers for the simulation scenarios.

Each replication owns an RngStream built from (seed, stream_id) through
numpy's SeedSequence spawn keys, so stream r draws the same variates no
matter which worker runs it or in what order.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from prhr.exceptions import DomainError
from prhr.samples import Sample

_MANTISSA = 2.0**53
MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0
    _generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= int(self.seed) <= MAX_SEED:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if int(self.stream_id) < 0:
            raise DomainError(f"stream_id must be nonnegative, got {self.stream_id}")
        sequence = np.random.SeedSequence(
            entropy=int(self.seed), spawn_key=(int(self.stream_id),)
        )
        generator = np.random.Generator(np.random.PCG64(sequence))
        object.__setattr__(self, "_generator", generator)

    def uniform(self, k: int) -> np.ndarray:
        """k uniforms on the open interval (0, 1): (j + 0.5) / 2^53."""
        draws = self._generator.integers(0, 2**53, size=k, dtype=np.int64)
        return (draws + 0.5) / _MANTISSA


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive and finite, got {value}")
    return value


def _count(k: int) -> int:
    if int(k) < 1:
        raise DomainError(f"sample size must be at least 1, got {k}")
    return int(k)


def ged_quantile(u, lam: float, theta: float) -> np.ndarray:
    """Inverse of F(t) = (1 - exp(-lam t))^theta."""
    lam = _positive("lambda", lam)
    theta = _positive("theta", theta)
    u = np.asarray(u, dtype=np.float64)
    return -np.log1p(-(u ** (1.0 / theta))) / lam


def frechet_quantile(u, alpha: float) -> np.ndarray:
    """Inverse of F(x) = exp(-x^(-alpha))."""
    alpha = _positive("alpha", alpha)
    u = np.asarray(u, dtype=np.float64)
    return (-np.log(u)) ** (-1.0 / alpha)


def gumbel_quantile(u, gamma: float) -> np.ndarray:
    """Inverse of F(x) = exp(-exp(-gamma x)); support is the real line."""
    gamma = _positive("gamma", gamma)
    u = np.asarray(u, dtype=np.float64)
    return -np.log(-np.log(u)) / gamma


def sample_ged(
    rng: RngStream, lam: float, theta: float, k: int, label: str = "ged"
) -> Sample:
    """GED(lam, theta); theta = 1 is the exponential distribution with rate lam."""
    k = _count(k)
    lam, theta = _positive("lambda", lam), _positive("theta", theta)
    return Sample(ged_quantile(rng.uniform(k), lam, theta), label=label)


def sample_exponential(
    rng: RngStream, lam: float, k: int, label: str = "exponential"
) -> Sample:
    return sample_ged(rng, lam, 1.0, k, label=label)


def sample_frechet(rng: RngStream, alpha: float, k: int, label: str = "frechet") -> Sample:
    k = _count(k)
    alpha = _positive("alpha", alpha)
    return Sample(frechet_quantile(rng.uniform(k), alpha), label=label)


def sample_gumbel(rng: RngStream, gamma: float, k: int, label: str = "gumbel") -> Sample:
    k = _count(k)
    gamma = _positive("gamma", gamma)
    return Sample(gumbel_quantile(rng.uniform(k), gamma), label=label)
