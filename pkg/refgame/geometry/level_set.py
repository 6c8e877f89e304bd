# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np

from refgame.errors import NonConvergence
from refgame.geometry import DEFAULT_BOUNDARY_TOL, Domain, DomainBounds
from refgame.log import get_child_logger

log = get_child_logger("level-set")

NEWTON_MAX_ITER = 50
NEWTON_TOL = 1e-12
_MAX_HALVINGS = 30

Field = Callable[[np.ndarray], np.ndarray]


class LevelSetDomain(Domain):
    """Domain given by user evaluators of phi and its derivatives.

    Projection solves the Lagrange conditions p - x - mu grad_phi(p) = 0,
    phi(p) = 0 by damped Newton.
    """

    NAME = "level-set"

    def __init__(self,
                 dimension: int,
                 phi: Field,
                 grad_phi: Field,
                 hess_phi: Field,
                 c0: float,
                 bounds: DomainBounds,
                 bounding_radius: float,
                 boundary_tol: float = DEFAULT_BOUNDARY_TOL,
                 name: str | None = None):
        super().__init__(dimension, c0, boundary_tol, name)
        self._phi = phi
        self._grad_phi = grad_phi
        self._hess_phi = hess_phi
        self._bounds = bounds
        self._bounding_radius = float(bounding_radius)

    def phi(self, x: np.ndarray) -> np.ndarray:
        return self._phi(np.asarray(x, dtype=float))

    def grad_phi(self, x: np.ndarray) -> np.ndarray:
        return self._grad_phi(np.asarray(x, dtype=float))

    def hess_phi(self, x: np.ndarray) -> np.ndarray:
        return self._hess_phi(np.asarray(x, dtype=float))

    @property
    def bounds(self) -> DomainBounds:
        return self._bounds

    @property
    def bounding_radius(self) -> float:
        return self._bounding_radius

    def project_points(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        points = x.copy()
        overshoot = np.zeros(len(x))
        for i in np.flatnonzero(self.phi(x) < 0):
            points[i] = self._newton(x[i])
            overshoot[i] = float(np.linalg.norm(x[i] - points[i]))
        return points, overshoot

    def _residual(self, x: np.ndarray, p: np.ndarray, mu: float) -> np.ndarray:
        grad = self.grad_phi(p[None])[0]
        return np.append(p - x - mu * grad, self.phi(p[None])[0])

    def _newton(self, x: np.ndarray) -> np.ndarray:
        n = self.dimension
        p, mu = x.copy(), 0.0
        residual = self._residual(x, p, mu)
        for iteration in range(NEWTON_MAX_ITER):
            norm = np.linalg.norm(residual)
            if norm < NEWTON_TOL:
                break
            grad = self.grad_phi(p[None])[0]
            jacobian = np.zeros((n + 1, n + 1))
            jacobian[:n, :n] = np.eye(n) - mu * self.hess_phi(p[None])[0]
            jacobian[:n, n] = -grad
            jacobian[n, :n] = grad
            try:
                delta = np.linalg.solve(jacobian, -residual)
            except np.linalg.LinAlgError as err:
                raise NonConvergence(f"singular projection system at {x.tolist()}: {err}") from err
            step = 1.0
            for _ in range(_MAX_HALVINGS):
                candidate = self._residual(x, p + step * delta[:n], mu + step * delta[n])
                if np.linalg.norm(candidate) < norm:
                    break
                step *= 0.5
            p, mu = p + step * delta[:n], mu + step * delta[n]
            residual = self._residual(x, p, mu)
            log.debug("projection of %s: iteration %d, residual %.3e", x, iteration, np.linalg.norm(residual))
        else:
            if np.linalg.norm(residual) >= NEWTON_TOL:
                raise NonConvergence(
                    f"projection of {x.tolist()} did not converge in {NEWTON_MAX_ITER} iterations"
                    f" (residual {np.linalg.norm(residual):.3e})")
        return p


class QuadricDomain(LevelSetDomain):
    """phi(x) = (level - sum_i q_i x_i^2) / 2 for positive coefficients q."""

    NAME = "quadric"

    def __init__(self,
                 coefficients: Sequence[float],
                 level: float = 1.0,
                 c0: float = 1.0,
                 boundary_tol: float = DEFAULT_BOUNDARY_TOL,
                 name: str | None = None):
        q = np.asarray(coefficients, dtype=float)
        if q.ndim != 1 or len(q) == 0 or np.any(q <= 0):
            raise ValueError(f"quadric coefficients must be positive, got {coefficients}")
        if level <= 0:
            raise ValueError(f"quadric level must be positive, got {level}")
        self.coefficients = q
        self.level = float(level)
        radius = float(np.sqrt(level / q.min()))
        bounds = DomainBounds(phi=level / 2.0, grad=float(q.max() * radius), hess=float(np.linalg.norm(q)))
        super().__init__(
            dimension=len(q),
            phi=lambda x: (self.level - np.sum(self.coefficients * x * x, axis=-1)) / 2.0,
            grad_phi=lambda x: -self.coefficients * x,
            hess_phi=lambda x: np.broadcast_to(-np.diag(self.coefficients), x.shape[:-1] + (len(q), len(q))).copy(),
            c0=c0,
            bounds=bounds,
            bounding_radius=radius,
            boundary_tol=boundary_tol,
            name=name,
        )
