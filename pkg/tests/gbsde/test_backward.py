# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import unittest

import numpy as np

from refgame import rsde
from refgame.dynamics import shifted
from refgame.dynamics.factory import FamilyFactory, ProblemFactory
from refgame.dynamics.fixtures import FixtureCatalog
from refgame.dynamics.policy import first_policies
from refgame.errors import SingularRegression
from refgame.gbsde import SchemeMode, SchemeOptions, solve_on_ensemble
from refgame.gbsde.checks import apriori_constant, comparison_check, difference_ratio, growth_table
from refgame.gbsde.regression import Basis, RegressionSpec, fit
from refgame.gbsde.semigroup import flow_check, semigroup_G
from refgame.log import get_child_logger

log = get_child_logger("test-gbsde")

SEED = 5
PATHS = 2000
STEPS = 50
X0 = 0.3
EXACT_TOL = 1e-9
LARGE_PATHS = 10_000
DISCOUNT_PROBLEM = {
    "name": "discount",
    "diffusion": {
        "family": "constant",
        "params": {
            "scale": 0.0
        }
    },
    "generator": {
        "family": "affine",
        "params": {
            "y": -1.0
        }
    },
    "terminal": {
        "family": "constant",
        "params": {
            "value": 1.0
        }
    },
}
REFLECTED_BM = {
    "name": "reflected-bm",
    "diffusion": {
        "family": "constant",
        "params": {
            "scale": 1.0
        }
    },
    "terminal": {
        "family": "cosine"
    },
}


class TestRegression(unittest.TestCase):

    def test_affine_reproduces_linear_targets(self):
        x = np.linspace(-1.0, 1.0, 50)[:, None]
        estimate = fit(x, RegressionSpec())
        np.testing.assert_allclose(estimate(3.0 * x[:, 0] + 1.0), 3.0 * x[:, 0] + 1.0, atol=1e-10)

    def test_constant_targets_pass_through(self):
        x = np.linspace(-1.0, 1.0, 20)[:, None]
        estimate = fit(x, RegressionSpec(Basis.QUADRATIC))
        np.testing.assert_array_equal(estimate(np.full(20, 2.5)), np.full(20, 2.5))

    def test_features_without_spread_use_the_mean(self):
        estimate = fit(np.zeros((10, 1)), RegressionSpec())
        np.testing.assert_allclose(estimate(np.arange(10.0)), np.full(10, 4.5))

    def test_collinear_features_are_singular(self):
        x = np.linspace(-1.0, 1.0, 30)
        with self.assertRaises(SingularRegression):
            fit(np.column_stack([x, 2.0 * x]), RegressionSpec())

    def test_ridge_regularizes(self):
        x = np.linspace(-1.0, 1.0, 30)
        estimate = fit(np.column_stack([x, 2.0 * x]), RegressionSpec(ridge=1e-3))
        self.assertLess(estimate.condition, 1e12)

    def test_bins(self):
        x = np.concatenate([np.zeros(5), np.ones(5)])[:, None]
        estimate = fit(x, RegressionSpec(Basis.BINS, bins=2))
        target = np.arange(10.0)
        np.testing.assert_allclose(estimate(target), np.repeat([2.0, 7.0], 5))

    def test_invalid_spec(self):
        with self.assertRaises(ValueError):
            RegressionSpec(ridge=-1.0)
        with self.assertRaises(ValueError):
            RegressionSpec(Basis.BINS, bins=0)


class TestTrivialFixture(unittest.TestCase):
    """Without noise the backward recursion is exact: Y_t = cos(pi x) + (T - t)."""

    def setUp(self):
        self.spec = FixtureCatalog.get("trivial").build()
        self.u, self.v = first_policies(self.spec.controls_U, self.spec.controls_V)

    def test_value(self):
        for t in (0.0, 0.5):
            ensemble = rsde.simulate(self.spec, self.u, self.v, t, [X0], 20, STEPS, SEED)
            solution = solve_on_ensemble(ensemble, self.spec, self.u, self.v, self.spec.coeffs.Phi)
            self.assertAlmostEqual(solution.value, np.cos(np.pi * X0) + (1.0 - t), delta=EXACT_TOL)
            self.assertEqual(solution.stderr, 0.0)
            np.testing.assert_allclose(solution.Z, 0.0, atol=EXACT_TOL)

    def test_implicit_agrees(self):
        ensemble = rsde.simulate(self.spec, self.u, self.v, 0.0, [X0], 5, STEPS, SEED)
        explicit = solve_on_ensemble(ensemble, self.spec, self.u, self.v, self.spec.coeffs.Phi,
                                     options=SchemeOptions(SchemeMode.EXPLICIT))
        implicit = solve_on_ensemble(ensemble, self.spec, self.u, self.v, self.spec.coeffs.Phi,
                                     options=SchemeOptions(SchemeMode.IMPLICIT))
        self.assertAlmostEqual(explicit.value, implicit.value, delta=EXACT_TOL)
        self.assertGreaterEqual(int(implicit.iterations.max()), 2)

    def test_terminal_values_override(self):
        ensemble = rsde.simulate(self.spec, self.u, self.v, 0.0, [X0], 5, STEPS, SEED)
        solution = solve_on_ensemble(ensemble, self.spec, self.u, self.v, None, terminal_values=np.zeros(5))
        self.assertAlmostEqual(solution.value, 1.0, delta=EXACT_TOL)
        with self.assertRaises(ValueError):
            solve_on_ensemble(ensemble, self.spec, self.u, self.v, None)

    def test_comparison_of_shifted_problems(self):
        ensemble = rsde.simulate(self.spec, self.u, self.v, 0.0, [X0], 1, STEPS, SEED)
        upper = shifted(self.spec, terminal=0.1)
        self.assertTrue(comparison_check(ensemble, self.spec, upper, self.u, self.v).passed)
        reversed_order = comparison_check(ensemble, upper, self.spec, self.u, self.v)
        self.assertFalse(reversed_order.passed)
        self.assertAlmostEqual(reversed_order.max_violation, 0.1, delta=EXACT_TOL)

    def test_difference_ratio_bounded(self):
        ensemble = rsde.simulate(self.spec, self.u, self.v, 0.0, [X0], 1, STEPS, SEED)
        ratio = difference_ratio(ensemble, self.spec, shifted(self.spec, terminal=0.1, generator=0.2), self.u, self.v)
        self.assertTrue(np.isfinite(ratio))
        self.assertGreater(ratio, 0.0)

    def test_semigroup_with_equal_times(self):
        value = semigroup_G(self.spec, 0.5, [X0], self.u, self.v, 0.5, self.spec.coeffs.Phi, 10, STEPS, SEED)
        self.assertAlmostEqual(value.value, np.cos(np.pi * X0), places=12)
        self.assertEqual(value.stderr, 0.0)

    def test_flow(self):
        result = flow_check(self.spec, 0.0, [X0], self.u, self.v, 0.5, 10, STEPS, SEED)
        self.assertAlmostEqual(result.direct, np.cos(np.pi * X0) + 1.0, delta=EXACT_TOL)
        self.assertLess(result.residual, 1e-9)
        self.assertAlmostEqual(result.s, 0.5, places=12)
        with self.assertRaises(ValueError):
            flow_check(self.spec, 0.0, [X0], self.u, self.v, 1.0, 10, STEPS, SEED)


class TestEigenfixture(unittest.TestCase):

    def setUp(self):
        self.spec = FixtureCatalog.get("eigenfixture").build()
        self.u, self.v = first_policies(self.spec.controls_U, self.spec.controls_V)

    def test_value_close_to_heat_mode(self):
        t = 0.9
        ensemble = rsde.simulate(self.spec, self.u, self.v, t, [0.0], PATHS, STEPS, SEED)
        solution = solve_on_ensemble(ensemble, self.spec, self.u, self.v, self.spec.coeffs.Phi)
        exact = float(np.exp(-np.pi**2 * (1.0 - t)))
        self.assertLess(abs(solution.value - exact), 5.0 * solution.stderr + 0.03)

    def test_growth_and_apriori(self):
        ensemble = rsde.simulate(self.spec, self.u, self.v, 0.0, [0.0], 500, 20, SEED)
        constant = apriori_constant(ensemble, self.spec, self.u, self.v)
        self.assertTrue(np.isfinite(constant))
        self.assertGreater(constant, 0.0)
        table = growth_table(self.spec, self.u, self.v, [[0.0], [0.5], [1.0]], 0.0, 200, 20, SEED)
        self.assertEqual(list(table.columns), ["zeta_norm", "moment", "ratio"])
        self.assertEqual(len(table), 3)
        self.assertTrue(np.all(np.isfinite(table["ratio"])))


class TestDeterministicOracles(unittest.TestCase):

    def test_discounted_constant(self):
        # Y' = Y backwards from Y_T = 1 over a unit interval
        spec = ProblemFactory.from_config(DISCOUNT_PROBLEM)
        u, v = first_policies(spec.controls_U, spec.controls_V)
        ensemble = rsde.simulate(spec, u, v, 0.0, [0.0], 10, 1000, SEED)
        solution = solve_on_ensemble(ensemble, spec, u, v, spec.coeffs.Phi)
        self.assertAlmostEqual(solution.value, np.exp(-1.0), delta=5e-3)

    def test_constant_boundary_cost_pays_the_local_time(self):
        c = 2.5
        spec = FixtureCatalog.get("drift-reflection").build()
        spec = spec.with_coeffs(boundary_cost=FamilyFactory.create("boundary_cost", "affine", {"constant": c}, 1, 1))
        u, v = first_policies(spec.controls_U, spec.controls_V)
        ensemble = rsde.simulate(spec, u, v, 0.0, [0.9], 1, 20, SEED)
        self.assertGreater(ensemble.eta[0, -1], 0.8)
        solution = solve_on_ensemble(ensemble, spec, u, v, spec.coeffs.Phi)
        expected = ensemble.X[0, -1, 0] + c * (ensemble.eta[0, -1] - ensemble.eta[0])
        np.testing.assert_allclose(solution.Y[0], expected, atol=1e-12)


class TestReflectedBrownianMotion(unittest.TestCase):
    """sigma = 1 on [-1, 1] with Phi = cos(pi x)."""

    def setUp(self):
        self.spec = ProblemFactory.from_config(REFLECTED_BM)
        self.u, self.v = first_policies(self.spec.controls_U, self.spec.controls_V)
        self.reg = RegressionSpec(Basis.QUADRATIC)

    def test_flow(self):
        discounted = self.spec.with_coeffs(generator=FamilyFactory.create("generator", "affine", {"y": -1.0}, 1, 1))
        for spec in (self.spec, discounted):
            result = flow_check(spec, 0.0, [X0], self.u, self.v, 0.5, LARGE_PATHS, STEPS, SEED, self.reg)
            log.debug("flow of %s: %s", spec.name, result)
            self.assertTrue(result.within(), result)

    def test_comparison_of_shifted_generators(self):
        ensemble = rsde.simulate(self.spec, self.u, self.v, 0.0, [X0], PATHS, STEPS, SEED)
        lower = shifted(self.spec, generator=-0.5)
        result = comparison_check(ensemble, lower, self.spec, self.u, self.v, self.reg)
        self.assertEqual(result.violations, 0)
        self.assertTrue(result.passed)

    def test_apriori_constant_is_stable_in_the_path_count(self):
        constants = []
        for count in (PATHS, 2 * PATHS):
            ensemble = rsde.simulate(self.spec, self.u, self.v, 0.0, [X0], count, STEPS, SEED)
            constants.append(apriori_constant(ensemble, self.spec, self.u, self.v, self.reg))
        self.assertTrue(np.all(np.isfinite(constants)))
        self.assertLess(abs(constants[1] - constants[0]), 0.2 * constants[0])


if __name__ == '__main__':
    unittest.main()
