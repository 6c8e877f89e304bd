# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from refgame.dynamics import Player
from refgame.dynamics.fixtures import FixtureCatalog
from refgame.game.cross_validate import Resolution, cross_validate
from refgame.game.dpp import CheckMode, dpp_check, dpp_value, stopping_steps, strategy_value
from refgame.game.feedback import FeedbackTables
from refgame.game.quadrature import DPPConfig, QuadratureRule, StopRule
from refgame.game.regularity import regularity_check
from refgame.isaacs.hamiltonian import reduce_table
from refgame.isaacs.scheme import solve
from refgame.log import get_child_logger
from refgame.model.value_grid import Kind

log = get_child_logger("test-game")

SEED = 17
H = 0.1
DELTA = 0.05
EXACT_TOL = 1e-9
MATCHING_PENNIES = [[1.0, -1.0], [-1.0, 1.0]]
HEAT_MODE_AT_09 = float(np.exp(-0.1 * np.pi**2))
FINE_H = 0.01
FINE_DELTA = 0.0025
LARGE_PATHS = 10_000

payoffs = arrays(np.float64, st.tuples(st.integers(1, 3), st.integers(1, 3)),
                 elements=st.floats(min_value=-5.0, max_value=5.0, allow_nan=False))


class TestStrategyValue(unittest.TestCase):

    def test_matching_pennies(self):
        self.assertEqual(strategy_value(MATCHING_PENNIES, Kind.LOWER), -1.0)
        self.assertEqual(strategy_value(MATCHING_PENNIES, Kind.UPPER), 1.0)

    @settings(max_examples=60, deadline=None)
    @given(payoffs)
    def test_strategy_maps_reduce_to_max_min(self, table):
        for kind in Kind:
            value, _, _ = reduce_table(table[None], kind)
            self.assertAlmostEqual(strategy_value(table, kind), float(value[0]), places=12)
        self.assertLessEqual(strategy_value(table, Kind.LOWER), strategy_value(table, Kind.UPPER))


class TestDPPConfig(unittest.TestCase):

    def test_layers(self):
        self.assertEqual(DPPConfig(delta=DELTA).layers(1.0), 20)
        with self.assertRaises(ValueError):
            DPPConfig(delta=0.3).layers(1.0)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            DPPConfig(delta=0.0)
        with self.assertRaises(ValueError):
            DPPConfig(delta=DELTA, cap=0)

    def test_gauss_hermite_moments(self):
        weights, points = DPPConfig(delta=DELTA, nodes=5).increments(2)
        self.assertEqual(points.shape, (25, 2))
        self.assertAlmostEqual(weights.sum(), 1.0, places=12)
        np.testing.assert_allclose(weights @ points, 0.0, atol=1e-12)
        np.testing.assert_allclose(weights @ points**2, 1.0, atol=1e-12)

    def test_monte_carlo_fallback(self):
        weights, points = DPPConfig(delta=DELTA, samples=64).increments(3, SEED)
        self.assertEqual(points.shape, (64, 3))
        np.testing.assert_allclose(weights, 1.0 / 64)
        mc_weights, _ = DPPConfig(delta=DELTA, quadrature=QuadratureRule.MC, samples=10).increments(1, SEED)
        self.assertEqual(len(mc_weights), 10)


class TestTrivialRecursion(unittest.TestCase):
    """Noise-free and control-free: W(t, x) = cos(pi x) + (T - t) on every node."""

    @classmethod
    def setUpClass(cls):
        cls.spec = FixtureCatalog.get("trivial").build()
        cls.grid = dpp_value(cls.spec, Kind.LOWER, H, DPPConfig(delta=DELTA), SEED)

    def test_exact(self):
        x = self.grid.mesh.points[:, 0]
        expected = np.cos(np.pi * x)[None, :] + (1.0 - self.grid.times)[:, None]
        np.testing.assert_allclose(self.grid.values, expected, atol=EXACT_TOL)
        self.assertEqual(self.grid.meta["scheme"], "semi-lagrangian")

    def test_threads_do_not_change_the_grid(self):
        several = dpp_value(self.spec, Kind.LOWER, H, DPPConfig(delta=DELTA), SEED, threads=3)
        np.testing.assert_array_equal(several.values, self.grid.values)

    def test_regularity(self):
        report = regularity_check(self.grid)
        self.assertTrue(report.passed, report.summary())
        self.assertEqual(set(report.table["direction"]), {"x", "t"})
        self.assertTrue(np.isfinite(report.C_x))

    def test_principle_holds(self):
        weak = dpp_check(self.spec, Kind.LOWER, self.grid, CheckMode.WEAK, DPPConfig(delta=DELTA), 4, SEED, probes=3)
        self.assertEqual(len(weak.rows), 3)
        self.assertLess(weak.max_residual, EXACT_TOL)
        self.assertTrue(weak.within())

    def test_strong_fixed_rule_matches_weak(self):
        config = DPPConfig(delta=DELTA, stop_rule=StopRule.FIXED)
        weak = dpp_check(self.spec, Kind.LOWER, self.grid, CheckMode.WEAK, config, 4, SEED, probes=3)
        strong = dpp_check(self.spec, Kind.LOWER, self.grid, CheckMode.STRONG, config, 4, SEED, probes=3)
        np.testing.assert_allclose(strong.rows["residual"], weak.rows["residual"])


class TestFeedback(unittest.TestCase):

    def test_policies_pick_control_points(self):
        spec = FixtureCatalog.get("uv-game").build()
        tables = FeedbackTables(spec, solve(spec, Kind.LOWER, H))
        x = np.array([[-0.5], [0.0], [0.5]])
        for player, controls in ((Player.U, spec.controls_U), (Player.V, spec.controls_V)):
            chosen = tables.policy(player)(0.5, x)
            self.assertEqual(chosen.shape, (3, 1))
            self.assertTrue(all(point in controls.points[:, 0] for point in chosen[:, 0]))
        # the maximizer is indifferent and keeps the first point, the minimizer answers with +1
        np.testing.assert_array_equal(tables.policy(Player.U)(0.5, x), [[-1.0]] * 3)
        np.testing.assert_array_equal(tables.policy(Player.V)(0.5, x), [[1.0]] * 3)


class TestCrossValidate(unittest.TestCase):

    def test_trivial_fixture_agrees_everywhere(self):
        resolution = Resolution(h=H, layers=20, paths=4, steps=10)
        result = cross_validate(FixtureCatalog.get("trivial"), [resolution], seed=SEED)
        table = result.table
        self.assertEqual(len(table), 2)
        self.assertEqual(set(table["kind"]), {"lower"})
        np.testing.assert_allclose(table["isaacs"], table["exact"], atol=1e-9)
        self.assertLess(result.max_difference(), 1e-6)
        self.assertTrue(result.agrees())


class TestEigenfixtureRecursion(unittest.TestCase):
    """The uncontrolled reflected heat equation, W(t, x) = exp(-pi^2 (T - t)) cos(pi x)."""

    @classmethod
    def setUpClass(cls):
        cls.fixture = FixtureCatalog.get("eigenfixture")
        cls.spec = cls.fixture.build()
        cls.grid = dpp_value(cls.spec, Kind.LOWER, FINE_H, DPPConfig(delta=FINE_DELTA), SEED)

    def test_value_close_to_heat_mode(self):
        self.assertAlmostEqual(float(self.grid.value_at(0.9, [0.0])[0]), HEAT_MODE_AT_09, delta=0.02)

    def test_regularity(self):
        report = regularity_check(self.grid)
        self.assertTrue(report.passed, report.summary())

    def test_weak_and_strong_principle(self):
        for mode, config in ((CheckMode.WEAK, DPPConfig(delta=FINE_DELTA)),
                             (CheckMode.STRONG, DPPConfig(delta=FINE_DELTA, stop_rule=StopRule.BOUNDARY_HIT))):
            check = dpp_check(self.spec, Kind.LOWER, self.grid, mode, config, LARGE_PATHS, SEED, probes=6)
            log.debug("%s: %s", mode, check.summary())
            self.assertTrue(check.within(), check.summary())
            rows = check.rows
            self.assertTrue((rows["residual"] <= 3.0 * rows["stderr"] + 0.02).all(), rows.to_string())
            self.assertTrue((rows["tau_mean"] >= rows["t"] + FINE_DELTA - 1e-12).all())

    def test_three_way_agreement(self):
        resolution = Resolution(h=FINE_H, layers=400, paths=LARGE_PATHS, steps=400)
        result = cross_validate(self.fixture, [resolution], seed=SEED)
        self.assertEqual(list(result.table["t"]), [0.5, 0.9])
        np.testing.assert_allclose(result.table["isaacs"], result.table["exact"], atol=0.03)
        self.assertTrue(result.agrees(0.03), result.table.to_string())


class TestStoppingSteps(unittest.TestCase):

    def setUp(self):
        self.spec = FixtureCatalog.get("eigenfixture").build()
        # on the wall throughout, inside throughout, inside until step 3
        self.X = np.array([[1.0, 1.0, 1.0, 1.0, 1.0], [0.0, 0.1, 0.2, 0.1, 0.0], [0.5, 0.7, 0.9, 1.0, 0.9]])[:, :, None]

    def test_fixed(self):
        np.testing.assert_array_equal(stopping_steps(self.spec, self.X, StopRule.FIXED, 2), [2, 2, 2])

    def test_boundary_start_runs_a_full_step(self):
        np.testing.assert_array_equal(stopping_steps(self.spec, self.X, StopRule.BOUNDARY_HIT, 1), [1, 4, 3])
        np.testing.assert_array_equal(stopping_steps(self.spec, self.X, StopRule.BOUNDARY_HIT, 2), [2, 4, 3])


class TestRegularity(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.grid = dpp_value(FixtureCatalog.get("trivial").build(), Kind.LOWER, H, DPPConfig(delta=DELTA), SEED)

    def test_constant_grid(self):
        report = regularity_check(self.grid.with_values(np.full_like(self.grid.values, 2.5)))
        self.assertEqual(report.C_x, 0.0)
        self.assertEqual(report.C_t, 0.0)
        np.testing.assert_array_equal(report.table["slack"], 0.0)
        self.assertTrue(report.passed)

    def test_constant_fitted_on_coarse_separations(self):
        table = regularity_check(self.grid).table
        for _, rows in table.groupby("direction"):
            fitted = rows[rows["fitted"]]
            self.assertGreater(len(fitted), 0)
            self.assertLess(len(fitted), len(rows))
            self.assertGreater(fitted["separation"].min(), rows.loc[~rows["fitted"], "separation"].max())

    def test_rough_profile_fails_out_of_sample(self):
        # |x|^(1/4) is not dominated by r + r^(1/2) near r = 0
        rough = np.abs(self.grid.mesh.points[:, 0])**0.25
        report = regularity_check(self.grid.with_values(np.tile(rough, (len(self.grid.times), 1))))
        x_rows = report.table[report.table["direction"] == "x"]
        self.assertTrue((x_rows.loc[x_rows["fitted"], "slack"] >= 0.0).all())
        self.assertTrue((x_rows.loc[~x_rows["fitted"], "slack"] < 0.0).any())
        self.assertFalse(report.passed)


if __name__ == '__main__':
    unittest.main()
