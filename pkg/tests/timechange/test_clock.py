# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import unittest

import numpy as np

from refgame.dynamics.factory import FamilyFactory
from refgame.dynamics.fixtures import FixtureCatalog
from refgame.errors import ConfigError, NotMonotone
from refgame.log import get_child_logger
from refgame.timechange import ASourceFactory, build, piecewise_A
from refgame.timechange.equivalence import commutation_check, equivalence_check
from refgame.timechange.representation import representation_limit

log = get_child_logger("test-timechange")

SEED = 2
# A = 0 on [0, 1], A_s = s - 1 on [1, 2]
S_GRID = np.linspace(0.0, 2.0, 201)
KNEE_A = piecewise_A(1.0, 1.0)
EPSILONS = (0.2, 0.1, 0.05)
LARGE_PATHS = 10_000


class TestBuild(unittest.TestCase):

    def setUp(self):
        self.clock = build(S_GRID, KNEE_A(S_GRID))

    def test_inverse(self):
        # tau_r = r on [0, 1] and (r + 1) / 2 on [1, 3]
        np.testing.assert_allclose(self.clock.tau_at([0.5, 1.0, 2.0, 3.0]), [0.5, 1.0, 1.5, 2.0], atol=1e-12)
        self.assertAlmostEqual(self.clock.psi[-1], 3.0, places=12)

    def test_densities(self):
        np.testing.assert_allclose(self.clock.a_at([0.25, 0.5]), [1.0, 1.0], atol=1e-9)
        np.testing.assert_allclose(self.clock.a_at([2.0, 2.5]), [0.5, 0.5], atol=1e-9)
        np.testing.assert_allclose(self.clock.a + self.clock.b, 1.0, atol=1e-15)
        self.assertTrue(np.all(self.clock.a > 0))

    def test_round_trip_and_budget(self):
        self.assertLess(self.clock.round_trip_error(), 1e-12)
        np.testing.assert_allclose(self.clock.clock_budget_error([0.5, 1.0, 2.0, 3.0]), 0.0, atol=1e-12)

    def test_clock_starts_at_t(self):
        s = np.linspace(0.5, 2.0, 151)
        clock = build(s, KNEE_A(s) + 7.0)
        self.assertEqual(clock.t, 0.5)
        self.assertAlmostEqual(clock.psi[0], 0.5, places=15)
        self.assertAlmostEqual(clock.r[0], 0.5, places=15)

    def test_not_monotone(self):
        with self.assertRaises(NotMonotone):
            build([0.0, 1.0, 2.0], [0.0, 1.0, 0.5])

    def test_bad_grid(self):
        with self.assertRaises(ValueError):
            build([0.0, 1.0, 1.0], [0.0, 0.0, 0.0])
        with self.assertRaises(ValueError):
            build([0.0, 1.0], [0.0, 0.0, 0.0])

    def test_commutation(self):
        self.assertLess(commutation_check(self.clock, np.cos, float(self.clock.r[-1])), 1e-6)


class TestASources(unittest.TestCase):

    def test_catalog(self):
        self.assertIn("local-time", ASourceFactory.list_available_sources())
        self.assertTrue(ASourceFactory.is_deterministic("piecewise"))
        self.assertFalse(ASourceFactory.is_deterministic("local-time"))

    def test_piecewise_from_config(self):
        a_function = ASourceFactory.get({"type": "piecewise", "slope": 2.0, "knee": 0.5})
        np.testing.assert_allclose(a_function(np.array([0.0, 0.5, 1.0])), [0.0, 0.0, 1.0])

    def test_local_time_is_not_a_function(self):
        with self.assertRaises(ConfigError):
            ASourceFactory.get({"type": "local-time"})


class TestRepresentation(unittest.TestCase):
    """With g = 0 and f = 1 the limit is the density b, here 1/2."""

    def setUp(self):
        self.spec = FixtureCatalog.get("drift-reflection").build()

    def test_deterministic_clock(self):
        t = 0.2
        table = representation_limit(self.spec, t, 0.5, [0.0], piecewise_A(1.0, t), EPSILONS, 200, 50, SEED)
        self.assertEqual(list(table.columns), ["epsilon", "estimate", "target", "abs_error", "stderr"])
        self.assertEqual(len(table), len(EPSILONS))
        np.testing.assert_allclose(table["target"], 0.5, atol=1e-9)
        np.testing.assert_allclose(table["estimate"], 0.5, atol=1e-6)

    def test_local_time_clock(self):
        # started on the wall, the drift pushes all of dt into the local time
        table = representation_limit(self.spec, 0.0, 0.0, [0.0], None, EPSILONS, 50, 200, SEED, x0=[1.0])
        np.testing.assert_allclose(table["target"], 0.5, atol=1e-6)
        np.testing.assert_allclose(table["estimate"], 0.5, atol=1e-6)

    def test_epsilons_checked(self):
        with self.assertRaises(ValueError):
            representation_limit(self.spec, 0.0, 0.0, [0.0], piecewise_A(), [0.1, -0.1], 10, 10, SEED)


def _with_generator(spec, **params):
    return spec.with_coeffs(generator=FamilyFactory.create("generator", "affine", params, 1, 1))


class TestRepresentationLimit(unittest.TestCase):
    """g = -y + z_1 and f = 1 past the knee, where a = b = 1/2."""

    def test_limit_on_the_slope(self):
        spec = _with_generator(FixtureCatalog.get("drift-reflection").build(), y=-1.0, z=[1.0])
        y, z = 0.5, 1.0
        table = representation_limit(spec, 1.5, y, [z], KNEE_A, (0.2, 0.1, 0.05, 0.025), LARGE_PATHS, 50, SEED)
        target = (-y + z) / 2 + 0.5
        np.testing.assert_allclose(table["target"], target, atol=1e-9)
        errors = table["abs_error"].to_numpy()
        log.debug("representation errors %s", errors)
        self.assertLess(errors[-1], errors[0])
        self.assertLessEqual(errors[-1], 0.05 * target)


class TestEquivalence(unittest.TestCase):

    def test_gbsde_and_changed_bsde_agree(self):
        spec = FixtureCatalog.get("drift-reflection").build()
        result = equivalence_check(spec, KNEE_A, 0.0, 2.0, lambda b: np.ones(len(b)), 200, 200, SEED)
        # Y = 1 + int f dA = 1 + (A_2 - A_0), and the b dr cells telescope to the same increment
        self.assertAlmostEqual(result.original, 2.0, places=9)
        self.assertLess(result.difference, 1e-9)

    def test_discounted_clock(self):
        # Y = 1 on [1, 2] and Y_0 = exp(-1)
        spec = _with_generator(FixtureCatalog.get("drift-reflection").build(), y=-1.0)
        result = equivalence_check(spec, KNEE_A, 0.0, 2.0, lambda b: np.ones(len(b)), LARGE_PATHS, 2000, SEED)
        self.assertAlmostEqual(result.original, np.exp(-1.0), delta=1e-2)
        self.assertLessEqual(result.difference, 1e-2)

    def test_wrong_clock_is_detected(self):
        spec = _with_generator(FixtureCatalog.get("drift-reflection").build(), y=-1.0)
        s = np.linspace(0.0, 2.0, 2001)
        stretched = build(s, 1.5 * KNEE_A(s))
        matched = equivalence_check(spec, KNEE_A, 0.0, 2.0, lambda b: np.ones(len(b)), 200, 200, SEED)
        wrong = equivalence_check(spec, KNEE_A, 0.0, 2.0, lambda b: np.ones(len(b)), 200, 200, SEED, clock=stretched)
        # the stretched clock solves the problem with f dA replaced by 1.5 f dA: Y_0 = (1.5 - 0.5 / e) / e
        self.assertLess(matched.difference, 0.02)
        self.assertAlmostEqual(wrong.changed, (1.5 - 0.5 * np.exp(-1.0)) * np.exp(-1.0), delta=0.02)
        self.assertGreater(wrong.difference, 0.1)


if __name__ == '__main__':
    unittest.main()
