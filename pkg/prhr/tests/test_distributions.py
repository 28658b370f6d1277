import math

import numpy as np
from django.test import SimpleTestCase, tag
from scipy import stats

from prhr.distributions import (
    RngStream,
    frechet_quantile,
    ged_quantile,
    gumbel_quantile,
    sample_exponential,
    sample_frechet,
    sample_ged,
    sample_gumbel,
)
from prhr.exceptions import DomainError


class FakeUniformStream:
    """Stream that hands out fixed uniforms, cycling if asked for more."""

    def __init__(self, values):
        self.values = np.asarray(values, dtype=np.float64)

    def uniform(self, k):
        return np.resize(self.values, k)


class QuantileTests(SimpleTestCase):
    def test_ged_quantile(self):
        """Test the GED inverse at hand-evaluated points."""
        self.assertAlmostEqual(float(ged_quantile(0.5, 1.0, 1.0)), math.log(2))
        self.assertAlmostEqual(float(ged_quantile(0.25, 1.0, 2.0)), math.log(2))
        self.assertAlmostEqual(float(ged_quantile(0.5, 2.0, 1.0)), math.log(2) / 2)

    def test_frechet_quantile(self):
        """Test the Frechet inverse at hand-evaluated points."""
        for alpha in (1.0, 3.0, 7.0):
            self.assertAlmostEqual(float(frechet_quantile(math.exp(-1), alpha)), 1.0)
        self.assertAlmostEqual(float(frechet_quantile(math.exp(-2), 1.0)), 0.5)
        self.assertAlmostEqual(float(frechet_quantile(math.exp(-4), 2.0)), 0.5)

    def test_gumbel_quantile(self):
        """Test the Gumbel inverse and its scale property."""
        for gamma in (1.0, 3.0):
            self.assertAlmostEqual(float(gumbel_quantile(math.exp(-1), gamma)), 0.0)
        self.assertAlmostEqual(float(gumbel_quantile(math.exp(-math.exp(-1)), 1.0)), 1.0)

        u = np.array([0.1, 0.4, 0.9])
        np.testing.assert_allclose(gumbel_quantile(u, 2.0), gumbel_quantile(u, 1.0) / 2)

    def test_nonpositive_parameters(self):
        """Test that every sampler rejects nonpositive parameters."""
        rng = RngStream(1)
        with self.assertRaises(DomainError):
            sample_ged(rng, 0.0, 1.0, 5)
        with self.assertRaises(DomainError):
            sample_ged(rng, 1.0, -2.0, 5)
        with self.assertRaises(DomainError):
            sample_frechet(rng, 0.0, 5)
        with self.assertRaises(DomainError):
            sample_gumbel(rng, -1.0, 5)
        with self.assertRaises(DomainError):
            sample_exponential(rng, 1.0, 0)


class SamplerTests(SimpleTestCase):
    def test_samplers_use_the_stream_uniforms(self):
        """Test that samplers transform exactly the uniforms they draw."""
        rng = FakeUniformStream([0.5, 0.25])

        ged = sample_ged(rng, 1.0, 2.0, 2)
        np.testing.assert_allclose(
            ged.values, sorted([-math.log1p(-math.sqrt(0.5)), math.log(2)])
        )

        frechet = sample_frechet(FakeUniformStream([math.exp(-1)]), 4.0, 3)
        np.testing.assert_allclose(frechet.values, [1.0, 1.0, 1.0])

    def test_exponential_is_ged_with_unit_theta(self):
        """Test that equal streams give identical exponential and GED(1) draws."""
        a = sample_exponential(RngStream(77, 3), 1.5, 40)
        b = sample_ged(RngStream(77, 3), 1.5, 1.0, 40)

        np.testing.assert_array_equal(a.values, b.values)


class RngStreamTests(SimpleTestCase):
    def test_same_seed_and_stream_reproduce(self):
        """Test bit-identical draws for equal (seed, stream_id)."""
        np.testing.assert_array_equal(
            RngStream(123, 9).uniform(100), RngStream(123, 9).uniform(100)
        )

    def test_distinct_streams_differ(self):
        """Test that neighbouring stream ids give different sequences."""
        a = RngStream(123, 0).uniform(100)
        b = RngStream(123, 1).uniform(100)

        self.assertFalse(np.array_equal(a, b))
        self.assertLess(abs(np.corrcoef(a, b)[0, 1]), 0.4)

    def test_uniforms_lie_in_open_interval(self):
        """Test that no uniform equals 0 or 1."""
        u = RngStream(5).uniform(100_000)

        self.assertGreater(u.min(), 0.0)
        self.assertLess(u.max(), 1.0)

    def test_seed_range(self):
        """Test that seeds outside the 64-bit unsigned range are refused."""
        RngStream(2**64 - 1)
        with self.assertRaises(DomainError):
            RngStream(-1)
        with self.assertRaises(DomainError):
            RngStream(2**64)


@tag("slow")
class GoodnessOfFitTests(SimpleTestCase):
    draws = 100_000

    def _assert_close(self, sample, cdf):
        distance = stats.kstest(sample.values, cdf).statistic
        self.assertLessEqual(distance, 0.01)

    def test_ged(self):
        """Test KS distance of GED draws for theta in {2, 4, 6}."""
        for theta in (2.0, 4.0, 6.0):
            sample = sample_ged(RngStream(11, int(theta)), 1.0, theta, self.draws)
            self._assert_close(sample, lambda t, th=theta: (1 - np.exp(-t)) ** th)

    def test_frechet(self):
        """Test KS distance of Frechet draws for alpha in {1, 3, 5, 7}."""
        for alpha in (1.0, 3.0, 5.0, 7.0):
            sample = sample_frechet(RngStream(12, int(alpha)), alpha, self.draws)
            self._assert_close(sample, stats.invweibull(alpha).cdf)

    def test_gumbel(self):
        """Test KS distance of Gumbel draws for gamma in {1, 3, 5, 7}."""
        for gamma in (1.0, 3.0, 5.0, 7.0):
            sample = sample_gumbel(RngStream(13, int(gamma)), gamma, self.draws)
            self._assert_close(sample, stats.gumbel_r(scale=1.0 / gamma).cdf)
