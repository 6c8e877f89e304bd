# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import unittest

import numpy as np

from refgame.dynamics import shifted
from refgame.dynamics.fixtures import FixtureCatalog
from refgame.errors import CFLViolation, MeshMismatch
from refgame.isaacs.checks import comparison_check, monotonicity_probe
from refgame.isaacs.hamiltonian import hamiltonian, isaacs_gap
from refgame.isaacs.mesh import build_mesh
from refgame.isaacs.residual import viscosity_residual
from refgame.isaacs.scheme import grid_from_function, solve, stable_time_step
from refgame.log import get_child_logger
from refgame.model.value_grid import Kind

log = get_child_logger("test-isaacs")

SEED = 13
FINE_H = 0.01
COARSE_H = 0.05
# e^{-pi^2/10}
EIGEN_VALUE = 0.3727


class TestMesh(unittest.TestCase):

    def test_interval_mesh(self):
        mesh = build_mesh(FixtureCatalog.get("eigenfixture").build().domain, FINE_H)
        self.assertEqual(mesh.node_count, 201)
        self.assertEqual(int(mesh.boundary.sum()), 2)
        np.testing.assert_allclose(mesh.normals[mesh.boundary, 0], [1.0, -1.0])

    def test_too_coarse(self):
        with self.assertRaises(ValueError):
            build_mesh(FixtureCatalog.get("eigenfixture").build().domain, 1.5)

    def test_stable_time_step(self):
        spec = FixtureCatalog.get("eigenfixture").build()
        # sigma^2 = 2, no drift
        self.assertAlmostEqual(stable_time_step(spec, build_mesh(spec.domain, FINE_H)), 0.9 * FINE_H**2 / 2.0)


class TestEigenfixture(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.spec = FixtureCatalog.get("eigenfixture").build()
        cls.grid = solve(cls.spec, Kind.LOWER, FINE_H)

    def test_heat_mode(self):
        self.assertAlmostEqual(float(self.grid.value_at(0.9, [0.0])[0]), EIGEN_VALUE, delta=0.01)

    def test_terminal_layer(self):
        np.testing.assert_allclose(self.grid.values[-1], np.cos(np.pi * self.grid.mesh.points[:, 0]))

    def test_cfl_violation(self):
        with self.assertRaises(CFLViolation):
            solve(self.spec, Kind.LOWER, FINE_H, time_steps=100)

    def _exact_residual(self, h: float) -> dict:
        fixture = FixtureCatalog.get("eigenfixture")
        steps = int(np.ceil(1.0 / stable_time_step(self.spec, build_mesh(self.spec.domain, h)) * (1.0 + 1e-12)))
        exact = grid_from_function(self.spec, Kind.LOWER, h, steps, lambda t, x: fixture.exact("lower", t, x))
        return viscosity_residual(exact, self.spec).summary()

    def test_exact_grid_residual(self):
        summary = self._exact_residual(FINE_H)
        self.assertLess(summary["max_abs_neumann"], 0.05)
        self.assertLess(summary["max_abs_interior"], 0.05)

    def test_residual_shrinks_with_the_mesh(self):
        residuals = [self._exact_residual(h)["max_abs_interior"] for h in (0.1, 0.05, 0.025)]
        log.debug("interior residuals %s", residuals)
        self.assertLess(residuals[1], residuals[0])
        self.assertLess(residuals[2], residuals[1])

    def test_constant_generator_shifts_linearly(self):
        c = 0.7
        moved = solve(shifted(self.spec, generator=c), Kind.LOWER, FINE_H, time_steps=len(self.grid.times) - 1)
        np.testing.assert_array_equal(moved.times, self.grid.times)
        shift = c * (1.0 - self.grid.times)[:, None]
        np.testing.assert_allclose(moved.values - self.grid.values, np.broadcast_to(shift, moved.values.shape),
                                   atol=1e-9)


class TestGame(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.spec = FixtureCatalog.get("uv-game").build()
        cls.lower = solve(cls.spec, Kind.LOWER, COARSE_H)
        cls.upper = solve(cls.spec, Kind.UPPER, COARSE_H)

    def test_gap_is_twice_the_remaining_time(self):
        difference = self.upper.values - self.lower.values
        np.testing.assert_allclose(difference, np.repeat(2.0 * (1.0 - self.lower.times)[:, None],
                                                         self.lower.mesh.node_count, axis=1),
                                   atol=1e-9)

    def test_lower_below_upper(self):
        self.assertTrue(comparison_check(self.lower, self.upper, same_kind=False).passed)
        reversed_order = comparison_check(self.upper, self.lower, same_kind=False)
        self.assertFalse(reversed_order.passed)
        self.assertAlmostEqual(reversed_order.max_difference, 2.0, places=9)

    def test_kinds_must_match(self):
        with self.assertRaises(MeshMismatch):
            comparison_check(self.lower, self.upper)

    def test_meshes_must_match(self):
        with self.assertRaises(MeshMismatch):
            comparison_check(self.lower, solve(self.spec, Kind.LOWER, 0.1), same_kind=False)

    def test_residual_of_solution(self):
        summary = viscosity_residual(self.lower, self.spec).summary()
        self.assertLess(summary["max_abs_interior"], 1e-6)


class TestHamiltonian(unittest.TestCase):

    def test_heat(self):
        spec = FixtureCatalog.get("eigenfixture").build()
        result = hamiltonian(spec, 0.3, [0.2], 0.5, [0.7], [[-1.5]], Kind.LOWER)
        self.assertAlmostEqual(result.value, -1.5)
        self.assertEqual((result.u_star, result.v_star), (0, 0))

    def test_uv_game(self):
        spec = FixtureCatalog.get("uv-game").build()
        lower = hamiltonian(spec, 0.0, [0.0], 0.0, [0.0], [[0.4]], Kind.LOWER)
        upper = hamiltonian(spec, 0.0, [0.0], 0.0, [0.0], [[0.4]], Kind.UPPER)
        self.assertAlmostEqual(lower.value, 0.4 - 1.0)
        self.assertAlmostEqual(upper.value, 0.4 + 1.0)
        # ties go to the lowest u index, v answers it
        self.assertEqual((lower.u_star, lower.v_star), (0, 1))
        self.assertEqual((upper.u_star, upper.v_star), (0, 0))

    def test_isaacs_gap(self):
        self.assertAlmostEqual(isaacs_gap(FixtureCatalog.get("eigenfixture").build(), 20, SEED).gap, 0.0)
        result = isaacs_gap(FixtureCatalog.get("uv-game").build(), 20, SEED)
        self.assertAlmostEqual(result.gap, 2.0)
        self.assertEqual(result.duality_violations, 0)
        self.assertIn("A", result.witness)

    def test_separable_game_has_no_gap(self):
        self.assertLess(isaacs_gap(FixtureCatalog.get("separable-game").build(), 20, SEED).gap, 1e-12)

    def test_gap_needs_samples(self):
        with self.assertRaises(ValueError):
            isaacs_gap(FixtureCatalog.get("uv-game").build(), 0, SEED)


class TestMonotonicity(unittest.TestCase):

    def test_probe(self):
        for name in ("eigenfixture", "uv-game", "drift-reflection"):
            probe = monotonicity_probe(FixtureCatalog.get(name).build(), Kind.LOWER, COARSE_H, SEED, probes=8)
            self.assertTrue(probe.passed, f"{name}: {probe.min_response}")
            self.assertEqual(probe.probes, 8)


if __name__ == '__main__':
    unittest.main()
