# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import numpy as np

from refgame.geometry import DEFAULT_BOUNDARY_TOL, Domain, DomainBounds

_SHRINK = np.nextafter(1.0, 0.0)


class BallDomain(Domain):
    """Centered n-ball with phi(x) = (R^2 - |x|^2) / (2R) and closed-form projection."""

    NAME = "ball"

    def __init__(self,
                 dimension: int,
                 radius: float = 1.0,
                 c0: float = 1.0,
                 boundary_tol: float = DEFAULT_BOUNDARY_TOL,
                 name: str | None = None):
        super().__init__(dimension, c0, boundary_tol, name)
        if radius <= 0:
            raise ValueError(f"radius must be positive, got {radius}")
        self.radius = float(radius)

    def phi(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (self.radius**2 - np.sum(x * x, axis=-1)) / (2.0 * self.radius)

    def grad_phi(self, x: np.ndarray) -> np.ndarray:
        return -np.asarray(x, dtype=float) / self.radius

    def hess_phi(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        eye = -np.eye(self.dimension) / self.radius
        return np.broadcast_to(eye, x.shape[:-1] + eye.shape).copy()

    @property
    def bounds(self) -> DomainBounds:
        return DomainBounds(phi=self.radius / 2.0, grad=1.0, hess=np.sqrt(self.dimension) / self.radius)

    @property
    def bounding_radius(self) -> float:
        return self.radius

    def boundary_point(self, direction: np.ndarray) -> np.ndarray:
        direction = np.atleast_2d(np.asarray(direction, dtype=float))
        norms = np.linalg.norm(direction, axis=1)
        unit = direction / np.where(norms > 0, norms, 1.0)[:, None]
        unit[norms == 0] = np.eye(self.dimension)[0]
        return self._inside_sphere(unit * self.radius)

    def project_points(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        norms = np.linalg.norm(x, axis=1)
        outside = norms > self.radius
        points = x.copy()
        points[outside] = self._inside_sphere(x[outside] * (self.radius / norms[outside])[:, None])
        overshoot = np.where(outside, norms - self.radius, 0.0)
        return points, overshoot

    def _inside_sphere(self, points: np.ndarray) -> np.ndarray:
        # rescaled points can land one ulp outside; pull them back so projection stays idempotent
        for _ in range(4):
            over = np.linalg.norm(points, axis=1) > self.radius
            if not over.any():
                break
            points[over] *= _SHRINK
        return points


class IntervalDomain(BallDomain):
    """The interval (-1, 1) with phi(x) = (1 - x^2) / 2."""

    NAME = "interval1d"

    def __init__(self, c0: float = 1.0, boundary_tol: float = DEFAULT_BOUNDARY_TOL, name: str | None = None):
        super().__init__(1, 1.0, c0, boundary_tol, name)
