# SPDX-FileCopyrightText: 2024 boomerang-walk developers
#
# SPDX-License-Identifier: LGPL-3.0-only

"""Test module for the :mod:`boomerang_walk.analysis` module"""
import unittest
import warnings

import _base_testing as bt
import numpy as np
import pytest

import boomerang_walk.analysis as ana
from boomerang_walk import rcParams
from boomerang_walk.common import ConfigurationError, FitError, SeriesError
from boomerang_walk.disorder import CentroidSeries, SimConfig, run_ensemble


def series_of(x):
    x = np.asarray(x, dtype=float)
    return CentroidSeries(x, x, np.zeros_like(x), np.zeros_like(x))


def make_config(**kwargs):
    params = dict(
        theta=np.pi / 4,
        disorder_width=0.2,
        horizon=40,
        ensemble_size=6,
        master_seed=1,
    )
    params.update(kwargs)
    return SimConfig(**params)


class MaxDisplacementTest(bt.WalkTestCase):
    """Test the extraction of the maximum mean position"""

    def test_rightward(self):
        md = ana.extract_x_max(series_of([0, 1, 2, 1, 0, -0.5]))
        self.assertEqual(md.x_max, 2)
        self.assertEqual(md.t_max, 2)
        self.assertTrue(md.returned)

    def test_leftward(self):
        md = ana.extract_x_max(
            series_of([0, -1, -3, -3, 1]), ana.Direction.LEFTWARD
        )
        self.assertEqual(md.x_max, 3)
        self.assertEqual(md.t_max, 2)

    def test_ballistic(self):
        md = ana.extract_x_max(series_of(np.arange(51)), "rightward")
        self.assertEqual(md.x_max, 50)
        self.assertEqual(md.t_max, 50)
        self.assertFalse(md.returned)

    def test_append_smaller(self):
        x = [0, 1, 2, 1, 0, -0.5]
        md = ana.extract_x_max(series_of(x))
        self.assertEqual(ana.extract_x_max(series_of(x + [1.5, -2])), md)

    def test_empty(self):
        with self.assertRaises(SeriesError):
            ana.extract_x_max(series_of([]))

    def test_return_time(self):
        x = [0, 1, 2, 1, 0.5, -0.5, 0.2]
        self.assertEqual(ana.return_time(series_of(x)), 5)
        self.assertIsNone(ana.return_time(series_of(np.arange(5))))
        self.assertEqual(
            ana.return_time(series_of([0, -1, 0]), "leftward"), 2
        )

    def test_default_direction(self):
        self.assertIs(
            ana.default_direction(make_config()), ana.Direction.RIGHTWARD
        )
        self.assertIs(
            ana.default_direction(make_config(alpha=np.pi)),
            ana.Direction.LEFTWARD,
        )


class PlateauTest(bt.WalkTestCase):
    """Test the late-time plateau"""

    def test_constant(self):
        level, band = ana.plateau_level(series_of(np.full(301, -0.5)), 0.2)
        self.assertEqual(level, -0.5)
        self.assertEqual(band, 0)

    def test_window(self):
        x = np.r_[np.zeros(80), np.arange(20.0)]
        level, band = ana.plateau_level(series_of(x), 0.2)
        self.assertEqual(level, np.arange(20.0).mean())
        self.assertAlmostEqual(band, np.arange(20.0).std())

    def test_default_fraction(self):
        x = np.r_[np.zeros(51), np.ones(50)]
        rcParams["analysis.plateau_fraction"] = 0.5
        self.assertEqual(ana.plateau_level(series_of(x))[0], 1)

    def test_invalid(self):
        with self.assertRaises(SeriesError):
            ana.plateau_level(series_of(np.zeros(30)), 0.2)
        with self.assertRaises(SeriesError):
            ana.plateau_level(series_of(np.zeros(300)), 0.6)
        with self.assertRaises(SeriesError):
            ana.plateau_level(series_of(np.zeros(300)), 0)


class PowerLawTest(bt.WalkTestCase):
    """Test the power-law fits"""

    def test_exact(self):
        xs = np.array([0.1, 0.2, 0.5, 1.0, 3.0])
        fit = ana.fit_power_law(xs, xs**-2.0, (0.1, 3.0))
        self.assertAlmostEqual(fit.exponent, -2.0, delta=1e-12)
        self.assertAlmostEqual(fit.r_squared, 1.0, delta=1e-12)
        self.assertEqual(fit.n_points, 5)
        self.assertAlmostEqual(fit.log_prefactor, 0, delta=1e-12)

    def test_perturbed(self):
        rng = np.random.default_rng(0)
        xs = np.geomspace(0.05, 0.5, 8)
        ys = 3 * xs**-2 * (1 + rng.uniform(-0.01, 0.01, 8))
        fit = ana.fit_power_law(xs, ys)
        self.assertAlmostEqual(fit.exponent, -2.0, delta=0.05)
        self.assertAlmostEqual(np.exp(fit.log_prefactor), 3, delta=0.1)
        self.assertLessEqual(fit.r_squared, 1)

    def test_scale_covariance(self):
        rng = np.random.default_rng(1)
        xs = np.geomspace(0.1, 1, 6)
        ys = xs**-1.5 * rng.uniform(0.9, 1.1, 6)
        fit = ana.fit_power_law(xs, ys)
        scaled = ana.fit_power_law(xs, 7 * ys)
        self.assertAlmostEqual(scaled.exponent, fit.exponent, delta=1e-12)
        self.assertAlmostEqual(scaled.r_squared, fit.r_squared, delta=1e-12)
        self.assertAlmostEqual(
            scaled.log_prefactor - fit.log_prefactor, np.log(7), delta=1e-12
        )

    def test_window(self):
        xs = np.array([0.01, 0.1, 0.2, 0.3, 1.4])
        ys = xs**-2.0
        ys[-1] = 1000
        fit = ana.fit_power_law(xs, ys, (0.01, 0.3))
        self.assertEqual(fit.n_points, 4)
        self.assertAlmostEqual(fit.exponent, -2, delta=1e-12)
        self.assertGreater(ana.breakdown_ratio(fit, 1.4, ys[-1]), 0)
        self.assertEqual(fit.to_dict()["fit_range"], [0.01, 0.3])

    def test_breakdown_ratio(self):
        xs = np.array([1.0, 2.0, 4.0])
        fit = ana.fit_power_law(xs, 16 * xs**-2.0)
        self.assertAlmostEqual(ana.breakdown_ratio(fit, 4.0, 0.5), 2.0)
        np.testing.assert_allclose(fit.predict([1, 2]), [16, 4])

    def test_errors(self):
        xs = np.array([0.1, 0.2, 0.3])
        with self.assertRaises(FitError):
            ana.fit_power_law(xs, [1, 2, -1])
        with self.assertRaises(FitError):
            ana.fit_power_law(xs, [1, 2, 3], (0.15, 0.3))
        with self.assertRaises(FitError):
            ana.fit_power_law([], [])
        with self.assertRaises(FitError):
            ana.fit_power_law(xs, [1, 2])


class SweepTest(bt.WalkTestCase):
    """Test the parameter sweeps"""

    def test_singleton_theta(self):
        base = make_config()
        result = ana.sweep_theta(base, [np.pi / 4])
        self.assertEqual(len(result.table), 1)
        direct = ana.extract_x_max(run_ensemble(base))
        row = result.table.iloc[0]
        self.assertEqual(row["theta"], np.pi / 4)
        self.assertEqual(row["x_max"], direct.x_max)
        self.assertEqual(row["t_max"], direct.t_max)
        np.testing.assert_array_equal(
            result.series[0].x_mean, run_ensemble(base).x_mean
        )

    def test_singleton_disorder(self):
        base = make_config()
        result = ana.sweep_disorder(base, [0.2])
        direct = ana.extract_x_max(run_ensemble(base))
        self.assertEqual(list(result.table.columns[:2]), ["W", "x_max"])
        self.assertEqual(result.table["x_max"][0], direct.x_max)

    def test_seed_offsets(self):
        base = make_config()
        result = ana.sweep_disorder(base, [0.2, 0.2])
        self.assertEqual(
            [c.master_seed for c in result.configs],
            [base.master_seed, base.master_seed + 1],
        )
        self.assertFalse(
            np.array_equal(result.series[0].x_mean, result.series[1].x_mean)
        )

    def test_reproducible(self):
        base = make_config()
        t1 = ana.sweep_theta(base, [0.3, 0.6]).table
        t2 = ana.sweep_theta(base, [0.3, 0.6]).table
        self.assertTrue(t1.equals(t2))

    def test_grid(self):
        result = ana.sweep_grid(make_config(), [0.3, 0.6], [0.1, 0.2, 0.3])
        self.assertEqual(len(result.table), 6)
        self.assertEqual(list(result.table["W"][:3]), [0.1, 0.2, 0.3])
        self.assertIn("return_time", result.table.columns)

    def test_grid_horizons(self):
        result = ana.sweep_grid(
            make_config(), [0.3, 0.6], [0.1, 0.2], horizons={(0.6, 0.1): 25}
        )
        self.assertEqual(list(result.table["horizon"]), [40, 40, 25, 40])
        self.assertEqual(
            list(result.table.columns[:4]), ["theta", "W", "x_max", "t_max"]
        )
        self.assertEqual(result.configs[2].horizon, 25)
        self.assertEqual(result.series[2].horizon, 25)

    def test_invalid_points(self):
        with self.assertRaises(ConfigurationError):
            ana.sweep_theta(make_config(), [0])
        with self.assertRaises(ConfigurationError):
            ana.sweep_disorder(make_config(), [0.1, 0])

    def test_mirror_consistency(self):
        base = make_config()
        right = ana.sweep_disorder(base, [0.1, 0.3], direction="rightward")
        left = ana.sweep_disorder(
            base.replace(alpha=np.pi, mirror_disorder=True),
            [0.1, 0.3],
            direction="leftward",
        )
        np.testing.assert_allclose(
            left.table["x_max"], right.table["x_max"], atol=1e-12
        )
        np.testing.assert_array_equal(
            left.table["t_max"], right.table["t_max"]
        )

    def test_extend_horizon(self):
        rcParams["analysis.max_horizon"] = 40
        base = make_config(theta=0, horizon=10, ensemble_size=1)
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter("always")
            result = ana.sweep_points(
                base, [{"theta": 0.0}], extend_horizon=True
            )
        row = result.table.iloc[0]
        self.assertEqual(row["horizon"], 40)
        self.assertEqual(row["t_max"], 40)
        self.assertFalse(row["returned"])
        self.assertEqual(result.configs[0].horizon, 40)
        self.assertTrue(w)


class BoomerangTest(bt.WalkTestCase):
    """Ensemble-scale checks of the boomerang signature"""

    @pytest.mark.slow
    def test_hadamard_plateaus(self):
        config = make_config(horizon=300, ensemble_size=5000, master_seed=42)
        right = run_ensemble(config)
        md = ana.extract_x_max(right)
        self.assertGreater(md.x_max, 1)
        self.assertGreater(md.t_max, 0)
        self.assertLess(md.t_max, 150)
        level, _ = ana.plateau_level(right, 0.2)
        self.assertGreaterEqual(level, -0.75)
        self.assertLessEqual(level, -0.25)

        left = run_ensemble(config.replace(alpha=np.pi))
        level, _ = ana.plateau_level(left, 0.2)
        self.assertGreaterEqual(level, 0.25)
        self.assertLessEqual(level, 0.75)

    @pytest.mark.slow
    def test_maximum_position(self):
        base = make_config(
            theta=np.pi / 9, horizon=2000, ensemble_size=2000, master_seed=42
        )
        result = ana.sweep_disorder(base, [0.1, 0.5])
        x_max = result.table["x_max"]
        self.assertGreaterEqual(x_max[0], 75)
        self.assertLessEqual(x_max[0], 105)
        self.assertGreaterEqual(x_max[1], 3)
        self.assertLessEqual(x_max[1], 7)

    @pytest.mark.slow
    def test_disorder_scaling(self):
        base = make_config(horizon=500, ensemble_size=2000, master_seed=42)
        widths = np.geomspace(0.05, 0.5, 8)
        result = ana.sweep_disorder(base, widths, extend_horizon=True)
        fit = ana.fit_power_law(widths, result.table["x_max"], (0.05, 0.5))
        self.assertAlmostEqual(fit.exponent, -2.0, delta=0.3)
        self.assertGreater(fit.r_squared, 0.95)

    @pytest.mark.slow
    def test_theta_scaling(self):
        base = make_config(
            disorder_width=0.3, horizon=500, ensemble_size=2000, master_seed=42
        )
        thetas = list(np.geomspace(np.pi / 90, np.pi / 9, 8))
        result = ana.sweep_theta(
            base, thetas + [7 * np.pi / 18], extend_horizon=True
        )
        table = result.table
        fit = ana.fit_power_law(
            table["theta"], table["x_max"], (np.pi / 90, np.pi / 9)
        )
        self.assertEqual(fit.n_points, 8)
        self.assertAlmostEqual(fit.exponent, -2.0, delta=0.3)
        ratio = ana.breakdown_ratio(
            fit, 7 * np.pi / 18, table["x_max"].iloc[-1]
        )
        self.assertGreaterEqual(ratio, 2)


if __name__ == "__main__":
    unittest.main()
