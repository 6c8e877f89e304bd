# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Built-in problems, with their value functions where a closed form is known."""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass
from typing import Any

import numpy as np

from refgame.dynamics import CoefficientSet, ControlSet, Player, ProblemSpec
from refgame.dynamics.factory import FamilyFactory
from refgame.errors import ConfigError
from refgame.geometry import Domain
from refgame.geometry.ball import BallDomain, IntervalDomain

ExactValue = Callable[[float, np.ndarray], np.ndarray]

HORIZON = 1.0
SQRT2 = float(np.sqrt(2.0))


@dataclass(slots=True, frozen=True)
class Fixture:
    name: str
    description: str
    build: Callable[[], ProblemSpec]
    lower: ExactValue | None = None
    """Closed-form lower value W(t, x), if known."""
    upper: ExactValue | None = None

    def exact(self, kind: str, t: float, x: np.ndarray) -> np.ndarray | None:
        value = self.lower if kind == "lower" else self.upper
        if value is None:
            return None
        return value(t, np.atleast_2d(np.asarray(x, dtype=float)))

    @property
    def has_exact(self) -> bool:
        return self.lower is not None


def _problem(name: str,
             domain: Domain,
             families: Mapping[str, tuple[str, dict[str, Any]]],
             constants: Mapping[str, float],
             controls_u: ControlSet | None = None,
             controls_v: ControlSet | None = None) -> ProblemSpec:
    n = domain.dimension
    made = {
        role: FamilyFactory.create(role, family, params, n, n)
        for role, (family, params) in {
            "drift": ("zero", {}),
            "diffusion": ("constant", {
                "scale": 0.0
            }),
            "generator": ("affine", {}),
            "boundary_cost": ("affine", {}),
            "terminal": ("constant", {}),
            **families
        }.items()
    }
    coeffs = CoefficientSet(drift=made["drift"],
                            diffusion=made["diffusion"],
                            generator=made["generator"],
                            boundary_cost=made["boundary_cost"],
                            terminal=made["terminal"],
                            brownian_dimension=n,
                            K=constants.get("K", 1.0),
                            lambda1=constants.get("lambda1", 0.0),
                            lambda2=constants.get("lambda2", 0.0),
                            bound=constants.get("bound", 1.0))
    return ProblemSpec(domain, coeffs, controls_u or ControlSet.singleton(Player.U),
                       controls_v or ControlSet.singleton(Player.V), HORIZON, name)


def _heat_mode(t: float, x: np.ndarray) -> np.ndarray:
    return np.exp(-np.pi**2 * (HORIZON - t)) * np.cos(np.pi * x[:, 0])


def _heat_mode_shift(rate: float) -> ExactValue:
    """The heat mode plus rate * (T - t), the value of a constant running cost `rate`."""
    return lambda t, x: _heat_mode(t, x) + rate * (HORIZON - t)


def _cosine_plus_clock(t: float, x: np.ndarray) -> np.ndarray:
    return np.cos(np.pi * x[:, 0]) + (HORIZON - t)


def _position_plus_clock(t: float, x: np.ndarray) -> np.ndarray:
    # Phi(X_T) + eta_T = x + T - t, before and after the wall is reached
    return x[:, 0] + (HORIZON - t)


_COSINE = ("cosine", {})
_HEAT = ("constant", {"scale": SQRT2})


def _trivial() -> ProblemSpec:
    return _problem("trivial", IntervalDomain(), {
        "generator": ("affine", {
            "constant": 1.0
        }),
        "terminal": _COSINE
    }, {"K": np.pi})


def _eigenfixture() -> ProblemSpec:
    return _problem("eigenfixture", IntervalDomain(), {"diffusion": _HEAT, "terminal": _COSINE}, {"K": np.pi, "bound": 2.0})


def _uv_game() -> ProblemSpec:
    two_points = [[-1.0], [1.0]]
    return _problem("uv-game",
                    IntervalDomain(), {
                        "diffusion": _HEAT,
                        "generator": ("affine", {
                            "uv": 1.0
                        }),
                        "terminal": _COSINE
                    }, {
                        "K": np.pi,
                        "bound": 2.0
                    },
                    controls_u=ControlSet(two_points, Player.U),
                    controls_v=ControlSet(two_points, Player.V))


def _separable_game() -> ProblemSpec:
    return _problem("separable-game",
                    IntervalDomain(), {
                        "diffusion": _HEAT,
                        "generator": ("affine", {
                            "u": 0.5,
                            "v": 1.0
                        }),
                        "terminal": _COSINE
                    }, {
                        "K": np.pi,
                        "bound": 2.0
                    },
                    controls_u=ControlSet.uniform(Player.U, 1, 3),
                    controls_v=ControlSet.uniform(Player.V, 1, 3))


def _drift_reflection() -> ProblemSpec:
    return _problem("drift-reflection", IntervalDomain(), {
        "drift": ("constant", {
            "offset": [1.0]
        }),
        "boundary_cost": ("affine", {
            "constant": 1.0
        }),
        "terminal": ("linear", {}),
    }, {"K": 1.0})


def _unit_disk() -> ProblemSpec:
    return _problem("unit-disk", BallDomain(2), {
        "diffusion": ("constant", {
            "scale": 1.0
        }),
        "terminal": ("quadratic", {}),
    }, {
        "K": 2.0,
        "bound": 1.5
    })


_fixtures: dict[str, Fixture] = {
    fixture.name: fixture for fixture in (
        Fixture("trivial", "noise-free, control-free, g = 1, Phi = cos(pi x)", _trivial, _cosine_plus_clock,
                _cosine_plus_clock),
        Fixture("eigenfixture", "reflected heat equation, sigma = sqrt(2), Phi = cos(pi x)", _eigenfixture, _heat_mode,
                _heat_mode),
        Fixture("uv-game", "eigenfixture plus g = u v on U = V = {-1, 1}", _uv_game, _heat_mode_shift(-1.0),
                _heat_mode_shift(1.0)),
        Fixture("separable-game", "eigenfixture plus g = u/2 + v on U = V = {-1, 0, 1}", _separable_game,
                _heat_mode_shift(-0.5), _heat_mode_shift(-0.5)),
        Fixture("drift-reflection", "unit drift into the right wall, f = 1, Phi(x) = x", _drift_reflection,
                _position_plus_clock, _position_plus_clock),
        Fixture("unit-disk", "reflected planar Brownian motion on the unit disk, Phi = |x|^2", _unit_disk),
    )
}


class FixtureCatalog:

    @classmethod
    def list_available_fixtures(cls) -> list[str]:
        return list(_fixtures)

    @classmethod
    def is_fixture_available(cls, name: str) -> bool:
        return name in _fixtures

    @classmethod
    def get(cls, name: str) -> Fixture:
        if not cls.is_fixture_available(name):
            raise ConfigError(f"no such fixture '{name}', available are: {', '.join(_fixtures)}",
                              [f"invalid option 'fixture': {name}"])
        return _fixtures[name]
