# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Constraint domains O = {x : phi(x) > 0} and the projection onto their closure.

All evaluators are vectorized over a leading axis: points come in as arrays of
shape (N, n) and scalar fields go out with shape (N,).
"""

from __future__ import annotations

from dataclasses import dataclass
from refgame._compat import StrEnum

import numpy as np

from refgame.errors import NotOverriddenError
from refgame.streams import Purpose, generator, normals, open_uniforms

DEFAULT_BOUNDARY_TOL = 1e-9
_RAY_BISECTIONS = 80


class Region(StrEnum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR_PROJECTED = "exterior-projected"


@dataclass(slots=True, frozen=True)
class ProjectionResult:
    point: np.ndarray
    overshoot: float
    """Distance between the input and `point`; the discrete local-time mass."""
    region: Region


@dataclass(slots=True, frozen=True)
class DomainBounds:
    """Claimed bounds of |phi|, |grad phi| and the Frobenius norm of the Hessian on closure(O)."""

    phi: float
    grad: float
    hess: float


class Domain:
    """Interface of a bounded C^2 domain normalized so that |grad phi| = 1 on the boundary."""

    NAME: str = ""

    def __init__(self, dimension: int, c0: float, boundary_tol: float = DEFAULT_BOUNDARY_TOL, name: str | None = None):
        if dimension < 1:
            raise ValueError(f"domain dimension must be positive, got {dimension}")
        if c0 <= 0:
            raise ValueError(f"C0 must be positive, got {c0}")
        self.dimension = dimension
        self.c0 = float(c0)
        self.boundary_tol = float(boundary_tol)
        self.name = name or self.NAME

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, dimension={self.dimension})"

    def phi(self, x: np.ndarray) -> np.ndarray:
        raise NotOverriddenError()

    def grad_phi(self, x: np.ndarray) -> np.ndarray:
        raise NotOverriddenError()

    def hess_phi(self, x: np.ndarray) -> np.ndarray:
        raise NotOverriddenError()

    @property
    def bounds(self) -> DomainBounds:
        raise NotOverriddenError()

    @property
    def bounding_radius(self) -> float:
        """Radius of a centered ball containing closure(O)."""
        raise NotOverriddenError()

    def project_points(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Nearest points of closure(O) and the overshoot distances, for points of shape (N, n)."""
        raise NotOverriddenError()

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        r = self.bounding_radius
        return np.full(self.dimension, -r), np.full(self.dimension, r)

    def contains(self, x: np.ndarray) -> np.ndarray:
        return self.phi(x) >= -self.boundary_tol

    def boundary_point(self, direction: np.ndarray) -> np.ndarray:
        """Boundary points hit by rays from the origin, for directions of shape (N, n).

        Generic domains are assumed star-shaped with respect to the origin.
        """
        direction = np.atleast_2d(np.asarray(direction, dtype=float))
        norms = np.linalg.norm(direction, axis=1)
        unit = direction / np.where(norms > 0, norms, 1.0)[:, None]
        lo = np.zeros(len(unit))
        hi = np.full(len(unit), 1.05 * self.bounding_radius + 1.0)
        for _ in range(_RAY_BISECTIONS):
            mid = 0.5 * (lo + hi)
            inside = self.phi(unit * mid[:, None]) > 0
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return unit * lo[:, None]

    def inward_normal(self, x: np.ndarray) -> np.ndarray:
        """Unit inward normal at the radial projection of x onto the boundary."""
        normal = self.grad_phi(self.boundary_point(x))
        return normal / np.linalg.norm(normal, axis=1, keepdims=True)

    def sample_boundary(self, seed: int, count: int, stream: int = 0) -> np.ndarray:
        directions = normals(generator(seed, stream, Purpose.DOMAIN_SAMPLES), (count, self.dimension))
        return self.boundary_point(directions)

    def sample_closure(self, seed: int, count: int, stream: int = 0) -> np.ndarray:
        """Points of closure(O), uniform along each sampled ray."""
        edge = self.sample_boundary(seed, count, stream)
        radii = open_uniforms(generator(seed, stream + 1, Purpose.DOMAIN_SAMPLES), count)**(1.0 / self.dimension)
        return edge * radii[:, None]


def project(domain: Domain, x) -> ProjectionResult:
    point = np.asarray(x, dtype=float).reshape(1, domain.dimension)
    projected, overshoot = domain.project_points(point)
    if overshoot[0] > 0:
        region = Region.EXTERIOR_PROJECTED
    elif domain.phi(point)[0] <= domain.boundary_tol:
        region = Region.BOUNDARY
    else:
        region = Region.INTERIOR
    return ProjectionResult(point=projected[0], overshoot=float(overshoot[0]), region=region)
