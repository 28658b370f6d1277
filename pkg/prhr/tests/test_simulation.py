import numpy as np
from django.test import SimpleTestCase, override_settings, tag

from prhr.asymptotic import mw_estimate
from prhr.choices import ElRule, Method, Scenario
from prhr.distributions import RngStream, sample_exponential, sample_frechet, sample_ged
from prhr.exceptions import ConfigurationError
from prhr.kernel import u_statistic_value
from prhr.simulation import (
    TSV_COLUMNS,
    SimConfig,
    _aggregate,
    replicate,
    run_grid,
    run_power,
    run_simulation,
    run_type1,
)

ALPHAS = (0.01, 0.05, 0.10)


def _config(**overrides) -> SimConfig:
    options = dict(
        scenario=Scenario.NULL_GED,
        param=2.0,
        m=10,
        n=10,
        reps=40,
        alphas=ALPHAS,
        seed=42,
    )
    options.update(overrides)
    return SimConfig(**options)


class SimConfigTests(SimpleTestCase):
    def test_invalid_configurations(self):
        """Test that each precondition violation is a configuration error."""
        for overrides in (
            {"reps": 0},
            {"alphas": (0.05, 1.0)},
            {"alphas": ()},
            {"m": 2},
            {"n": 1},
            {"param": 0.0},
            {"seed": -1},
            {"scenario": "weibull"},
        ):
            with self.assertRaises(ConfigurationError, msg=str(overrides)):
                _config(**overrides)

    def test_frechet_roles(self):
        """Test that X carries the scenario shape and Y the unit shape."""
        config = _config(scenario=Scenario.FRECHET, param=5.0, m=6, n=8)
        x, y = config.draw(RngStream(42, 3))

        rng = RngStream(42, 3)
        np.testing.assert_array_equal(x.values, sample_frechet(rng, 5.0, 6).values)
        np.testing.assert_array_equal(y.values, sample_frechet(rng, 1.0, 8).values)

    def test_null_draws_exponential_then_ged(self):
        """Test the null scenario data-generating pair."""
        x, y = _config(m=5, n=7).draw(RngStream(42, 0))

        rng = RngStream(42, 0)
        np.testing.assert_array_equal(x.values, sample_ged(rng, 1.0, 1.0, 5).values)
        np.testing.assert_array_equal(y.values, sample_ged(rng, 1.0, 2.0, 7).values)

    def test_gumbel_draws_scale_gamma(self):
        """Test that Y is gamma times a standard Gumbel draw."""
        x, y = _config(scenario=Scenario.GUMBEL, param=3.0, m=5, n=6).draw(RngStream(42, 1))

        rng = RngStream(42, 1)
        np.testing.assert_array_equal(x.values, sample_exponential(rng, 1.0, 5).values)
        u = np.sort(rng.uniform(6))
        np.testing.assert_allclose(y.values, -3.0 * np.log(-np.log(u)), rtol=1e-12)

    @override_settings(PRHR={"DEFAULT_REPS": 17, "DEFAULT_SEED": 99})
    def test_reps_and_seed_default_to_settings(self):
        """Test that omitted reps and seed are read from settings."""
        config = SimConfig(scenario=Scenario.NULL_GED, param=2.0, m=5, n=5)

        self.assertEqual((config.reps, config.seed), (17, 99))


class RunSimulationTests(SimpleTestCase):
    def test_single_replication_rates(self):
        """Test that one replication gives rates of 0 or 1."""
        table = run_type1(_config(reps=1))

        for row in table.rows:
            self.assertIn(row.rejection_rate, (0.0, 1.0))
            self.assertIn(row.undefined_rate, (0.0, 1.0))

    def test_rows_cover_methods_and_alphas(self):
        """Test one row per method and significance level."""
        table = run_type1(_config())

        self.assertEqual(len(table.rows), 3 * len(ALPHAS))
        self.assertEqual({row.method for row in table.rows}, set(Method))

    def test_rates_are_monotone_in_alpha(self):
        """Test nested rejection regions within a run."""
        table = run_power(_config(scenario=Scenario.GUMBEL, param=3.0, reps=60))

        for method in Method:
            rates = [table.rate(method, alpha) for alpha in ALPHAS]
            self.assertEqual(rates, sorted(rates))

    def test_worker_count_does_not_change_results(self):
        """Test that parallel chunks merge into the serial result."""
        config = _config(reps=30)

        serial = run_simulation(config, max_workers=1)
        parallel = run_simulation(config, max_workers=3)

        self.assertEqual(serial.to_tsv(), parallel.to_tsv())

    def test_reruns_are_identical(self):
        """Test that the same configuration twice yields the same TSV."""
        config = _config(scenario=Scenario.FRECHET, param=3.0, reps=25)

        self.assertEqual(run_power(config).to_tsv(), run_power(config).to_tsv())

    def test_scenario_preconditions(self):
        """Test that type I runs need the null and power runs an alternative."""
        with self.assertRaises(ConfigurationError):
            run_type1(_config(scenario=Scenario.GUMBEL))
        with self.assertRaises(ConfigurationError):
            run_power(_config())

    def test_replicate_outcome_layout(self):
        """Test p-values in [0, 1] and signs in {-1, 0, 1}."""
        outcome = replicate(_config(), 0)

        self.assertEqual(outcome.shape, (5,))
        for p in outcome[[0, 1, 3]]:
            self.assertTrue(np.isnan(p) or 0.0 <= p <= 1.0)
        for sign in outcome[[2, 4]]:
            self.assertTrue(np.isnan(sign) or sign in (-1.0, 0.0, 1.0))

    def test_all_undefined_method(self):
        """Test rate 0 and undefined rate 1 when no replication is defined."""
        config = _config(reps=4)
        outcomes = np.full((4, 5), np.nan)
        outcomes[:, 0] = [0.001, 0.2, 0.5, 0.03]

        table = _aggregate(config, outcomes)

        self.assertEqual(table.rate(Method.JEL, 0.05), 0.0)
        self.assertEqual(table.rate(Method.UMW, 0.05), 0.5)
        jel = [row for row in table.rows if row.method == Method.JEL]
        self.assertTrue(all(row.undefined_rate == 1.0 for row in jel))

    def test_sign_gate(self):
        """Test that the gated rule drops rejections in the wrong direction."""
        outcomes = np.array(
            [
                [0.5, 0.001, 1.0, 0.001, 1.0],
                [0.5, 0.001, -1.0, 0.001, -1.0],
            ]
        )
        gated = _aggregate(_config(reps=2), outcomes)
        plain = _aggregate(_config(reps=2, el_rule=ElRule.CHI2), outcomes)

        self.assertEqual(gated.rate(Method.JEL, 0.05), 0.5)
        self.assertEqual(plain.rate(Method.JEL, 0.05), 1.0)

    def test_tsv_layout(self):
        """Test the header and the row count of the TSV output."""
        table = run_grid(
            Scenario.NULL_GED, [2.0, 4.0], [(5, 5), (6, 4)], reps=3, alphas=(0.05,), seed=7
        )
        lines = table.to_tsv().splitlines()

        self.assertEqual(lines[0].split("\t"), TSV_COLUMNS)
        self.assertEqual(len(lines), 1 + 2 * 2 * 3)
        self.assertEqual(lines[1].split("\t")[:5], ["null-ged", "2", "5", "5", "UMW"])
        self.assertEqual(lines[1].split("\t")[-1], "7")


@tag("slow")
class PublishedTableTests(SimpleTestCase):
    def _run(self, scenario, param, m, n, el_rule=ElRule.CHI2):
        config = SimConfig(
            scenario=scenario,
            param=param,
            m=m,
            n=n,
            reps=10000,
            alphas=ALPHAS,
            seed=20240601,
            el_rule=el_rule,
        )
        return run_simulation(config, max_workers=4)

    def test_type1_error_at_theta_two(self):
        """Test empirical sizes for theta = 2, (20, 20)."""
        table = self._run(Scenario.NULL_GED, 2.0, 20, 20)

        self.assertAlmostEqual(table.rate(Method.UMW, 0.05), 0.0668, delta=0.015)
        self.assertAlmostEqual(table.rate(Method.JEL, 0.05), 0.0641, delta=0.015)
        self.assertAlmostEqual(table.rate(Method.AJEL, 0.05), 0.0565, delta=0.015)

    def test_frechet_power(self):
        """Test empirical power for alpha2 = 5, (20, 20)."""
        table = self._run(Scenario.FRECHET, 5.0, 20, 20)

        self.assertAlmostEqual(table.rate(Method.UMW, 0.05), 0.9992, delta=0.01)
        self.assertAlmostEqual(table.rate(Method.JEL, 0.05), 0.9933, delta=0.01)
        self.assertAlmostEqual(table.rate(Method.AJEL, 0.05), 0.9916, delta=0.01)

    def test_frechet_power_near_one(self):
        """Test empirical power for alpha2 = 7, (25, 20) at the 1% level."""
        table = self._run(Scenario.FRECHET, 7.0, 25, 20)

        self.assertGreaterEqual(table.rate(Method.UMW, 0.01), 0.998)

    def test_gumbel_power(self):
        """Test empirical power for gamma = 3, (10, 10)."""
        table = self._run(Scenario.GUMBEL, 3.0, 10, 10)

        self.assertAlmostEqual(table.rate(Method.UMW, 0.05), 0.8945, delta=0.015)

    def test_power_grows_with_effect_size(self):
        """Test that alpha2 = 5 beats alpha2 = 3 for every method."""
        weak = self._run(Scenario.FRECHET, 3.0, 20, 20, ElRule.GATED)
        strong = self._run(Scenario.FRECHET, 5.0, 20, 20, ElRule.GATED)

        for method in Method:
            self.assertGreater(strong.rate(method, 0.05), weak.rate(method, 0.05))


@tag("slow")
class EstimatorBehaviourTests(SimpleTestCase):
    def test_theta_estimate_is_biased_upwards(self):
        """Test that the mean of theta-hat exceeds theta = 2 at m = n = 20."""
        estimates = []
        for r in range(10000):
            rng = RngStream(31, r)
            x = sample_ged(rng, 1.0, 1.0, 20)
            y = sample_ged(rng, 1.0, 2.0, 20)
            estimate = mw_estimate(x, y)
            if estimate.defined:
                estimates.append(estimate.theta)

        self.assertGreater(np.mean(estimates), 2.0)

    def test_u_concentrates_under_the_alternative(self):
        """Test that U is positive on average and its spread shrinks with size."""
        spreads = []
        for size in (20, 200):
            values = []
            for r in range(300):
                rng = RngStream(57, r)
                x = sample_frechet(rng, 3.0, size)
                y = sample_frechet(rng, 1.0, size)
                values.append(u_statistic_value(x, y))
            self.assertGreater(np.mean(values), 0.0)
            spreads.append(np.std(values))

        self.assertLess(spreads[1], spreads[0])
