# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Coefficients, control grids and the bundled problem of a constrained game."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from refgame._compat import StrEnum

import numpy as np

from refgame.dynamics.families import (BoundaryCost, Diffusion, Drift, Generator, ShiftedGenerator, ShiftedTerminal,
                                       Terminal)
from refgame.geometry import Domain


class Player(StrEnum):
    U = "U"
    V = "V"


@dataclass(slots=True, frozen=True)
class ControlSet:
    """Finite, duplicate-free grid of control points of one player."""

    points: np.ndarray
    """Control points, shape (k, m); m may be 0 for a player without influence."""
    label: Player

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if len(points) == 0:
            raise ValueError(f"the control set {self.label} is empty")
        if not np.all(np.isfinite(points)):
            raise ValueError(f"the control set {self.label} holds non-finite points")
        # order-preserving de-duplication
        _, first = np.unique(points, axis=0, return_index=True)
        object.__setattr__(self, "points", points[np.sort(first)])

    @classmethod
    def uniform(cls, label: Player, dimension: int = 1, count: int = 3, low: float = -1.0, high: float = 1.0):
        """Tensor grid of `count` points per axis of [low, high]^dimension."""
        if count == 1:
            axis = np.array([0.5 * (low + high)])
        else:
            axis = np.linspace(low, high, count)
        points = np.array(list(itertools.product(axis, repeat=dimension)))
        return cls(points.reshape(-1, dimension), label)

    @classmethod
    def singleton(cls, label: Player, dimension: int = 1) -> ControlSet:
        return cls(np.zeros((1, dimension)), label)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def repeat(self, index: int | np.ndarray, count: int | None = None) -> np.ndarray:
        """Control points per sample, shape (count, m)."""
        if np.ndim(index) == 0:
            return np.repeat(self.points[int(index)][None, :], count or 1, axis=0)
        return self.points[np.asarray(index, dtype=int)]


@dataclass(slots=True, frozen=True)
class CoefficientSet:
    """Coefficients of the state equation and the controlled GBSDE, with claimed constants."""

    drift: Drift
    diffusion: Diffusion
    generator: Generator
    boundary_cost: BoundaryCost
    terminal: Terminal
    brownian_dimension: int
    K: float
    """Claimed Lipschitz and growth constant."""
    lambda1: float
    """Claimed one-sided monotonicity constant of g in y."""
    lambda2: float
    """Claimed one-sided monotonicity constant of f in y."""
    bound: float
    """Claimed bound of |b| and |sigma| (Frobenius)."""

    def b(self, t: float, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.drift(t, x, u, v)

    def sigma(self, t: float, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.diffusion(t, x, u, v)

    def g(self, t: float, x: np.ndarray, y: np.ndarray, z: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.generator(t, x, y, z, u, v)

    def f(self, t: float, x: np.ndarray, y: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.boundary_cost(t, x, y, u, v)

    def Phi(self, x: np.ndarray) -> np.ndarray:  # pylint: disable=invalid-name
        return self.terminal(x)

    def replace(self, **changes) -> CoefficientSet:
        """A copy with some members swapped, e.g. a shifted terminal payoff."""
        return replace(self, **changes)


@dataclass(slots=True, frozen=True)
class ProblemSpec:
    domain: Domain
    coeffs: CoefficientSet
    controls_U: ControlSet  # pylint: disable=invalid-name
    controls_V: ControlSet  # pylint: disable=invalid-name
    T: float  # pylint: disable=invalid-name
    name: str = "inline"
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"the horizon T must be positive, got {self.T}")
        n, d = self.domain.dimension, self.coeffs.brownian_dimension
        x = np.zeros((1, n))
        u = self.controls_U.repeat(0)
        v = self.controls_V.repeat(0)
        drift = self.coeffs.b(0.0, x, u, v)
        if drift.shape != (1, n):
            raise ValueError(f"the drift returns shape {drift.shape[1:]}, expected ({n},)")
        sigma = self.coeffs.sigma(0.0, x, u, v)
        if sigma.shape != (1, n, d):
            raise ValueError(f"sigma returns shape {sigma.shape[1:]}, expected ({n}, {d})")
        value = self.coeffs.g(0.0, x, np.zeros(1), np.zeros((1, d)), u, v)
        if value.shape != (1,):
            raise ValueError(f"the generator returns shape {value.shape}, expected (1,)")

    @property
    def state_dimension(self) -> int:
        return self.domain.dimension

    @property
    def brownian_dimension(self) -> int:
        return self.coeffs.brownian_dimension

    def with_coeffs(self, **changes) -> ProblemSpec:
        return replace(self, coeffs=self.coeffs.replace(**changes))


def shifted(spec: ProblemSpec, terminal: float = 0.0, generator: float = 0.0) -> ProblemSpec:
    """The problem with Phi + terminal and g + generator."""
    changes = {}
    if terminal:
        changes["terminal"] = ShiftedTerminal(spec.coeffs.terminal, terminal)
    if generator:
        changes["generator"] = ShiftedGenerator(spec.coeffs.generator, generator)
    return replace(spec.with_coeffs(**changes), name=f"{spec.name}+shift")
