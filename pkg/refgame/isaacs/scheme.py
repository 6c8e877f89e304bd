# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Explicit monotone finite-difference scheme for the Isaacs equation with Neumann boundary."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from refgame.dynamics import ProblemSpec
from refgame.errors import CFLViolation, Divergence
from refgame.isaacs.hamiltonian import boundary_nonlinearity, game_table, reduce_table
from refgame.isaacs.mesh import Stencil, build_mesh
from refgame.log import get_child_logger, timed
from refgame.model.value_grid import Kind, Mesh, ValueGrid

log = get_child_logger("isaacs")

DEFAULT_CFL = 0.9
DIVERGENCE_BOUND = 1e6

CONFIG_SCHEMA = {
    "h": {
        "type": "float",
        "default": 0.01,
        "min": 1e-6,
        "meta": {
            "long_name": "mesh-width",
            "description": "Width of the tensor mesh",
        },
    },
    "time_steps": {
        "type": "integer",
        "nullable": True,
        "default": None,
        "min": 1,
        "meta": {
            "long_name": "time-steps",
            "description": "Number of time steps L, the smallest stable one when empty",
        },
    },
    "cfl": {
        "type": "float",
        "default": DEFAULT_CFL,
        "min": 1e-6,
        "max": 1.0,
        "meta": {
            "long_name": "cfl",
            "description": "Safety factor of the CFL condition",
        },
    },
    "kind": {
        "type": "list",
        "minlength": 1,
        "schema": {
            "type": "string",
            "allowed": [k.value for k in Kind]
        },
        "default": [Kind.LOWER.value, Kind.UPPER.value],
        "meta": {
            "long_name": "kind",
            "description": "Value functions to solve for",
        },
    },
}


@dataclass(slots=True, frozen=True)
class SchemeParams:
    h: float = 0.01
    time_steps: int | None = None
    cfl: float = DEFAULT_CFL

    @classmethod
    def from_config(cls, config) -> SchemeParams:
        return cls(h=config["h"], time_steps=config.get("time_steps"), cfl=config.get("cfl", DEFAULT_CFL))


def stable_time_step(spec: ProblemSpec, mesh: Mesh, cfl: float = DEFAULT_CFL) -> float:
    """Largest dt with dt (max |sigma|_F^2 + h max |b|_1) <= cfl h^2, and K dt <= cfl."""
    points = mesh.points
    worst_sigma, worst_drift = 0.0, 0.0
    for t in (0.0, spec.T):
        sigma = game_table(spec, len(points),
                           lambda u, v, t=t: np.sum(spec.coeffs.sigma(t, points, u, v)**2, axis=(1, 2)))
        drift = game_table(spec, len(points), lambda u, v, t=t: np.sum(np.abs(spec.coeffs.b(t, points, u, v)), axis=1))
        worst_sigma = max(worst_sigma, float(sigma.max()))
        worst_drift = max(worst_drift, float(drift.max()))
    h = mesh.h
    rate = worst_sigma + h * worst_drift
    dt = cfl * h**2 / rate if rate > 0 else np.inf
    if spec.coeffs.K > 0:
        dt = min(dt, cfl / spec.coeffs.K)
    return float(dt)


class IsaacsStepper:
    """One backward step W(t_k) = W(t_{k+1}) + dt H(t_{k+1}, x, W, D_h W, D_h^2 W) per call."""

    def __init__(self, spec: ProblemSpec, mesh: Mesh, kind: Kind) -> None:
        self.spec = spec
        self.mesh = mesh
        self.kind = Kind(kind)
        self.stencil = Stencil(mesh)
        self._boundary = np.flatnonzero(mesh.boundary)

    def flux(self, t: float, values: np.ndarray) -> np.ndarray:
        """Boundary nonlinearity at the boundary nodes, zero elsewhere."""
        flux = np.zeros(self.mesh.node_count)
        points = self.mesh.points[self._boundary]
        flux[self._boundary] = boundary_nonlinearity(self.spec, t, points, values[self._boundary], self.kind)[0]
        return flux

    def table(self, t: float, values: np.ndarray) -> np.ndarray:
        """Discrete Hamiltonian objective per node and control pair, drift upwinded per pair."""
        coeffs = self.spec.coeffs
        x = self.mesh.points
        d = self.stencil.derivatives(values, self.flux(t, values))

        def objective(u, v):
            sigma = coeffs.sigma(t, x, u, v)
            drift = coeffs.b(t, x, u, v)
            second = 0.5 * np.einsum("pik,pjk,pij->p", sigma, sigma, d.hessian)
            z = np.einsum("pik,pi->pk", sigma, d.central)
            return second + np.sum(drift * d.upwind(drift), axis=1) + coeffs.g(t, x, values, z, u, v)

        return game_table(self.spec, len(x), objective)

    def hamiltonian(self, t: float, values: np.ndarray) -> np.ndarray:
        return reduce_table(self.table(t, values), self.kind)[0]

    def step(self, t_next: float, dt: float, values: np.ndarray) -> np.ndarray:
        return values + dt * self.hamiltonian(t_next, values)

    def controls(self, t: float, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Optimal control indices per node for the layer at time t."""
        _, u_star, v_star = reduce_table(self.table(t, values), self.kind)
        return u_star, v_star


def solve(spec: ProblemSpec,
          kind: Kind,
          h: float,
          time_steps: int | None = None,
          cfl: float = DEFAULT_CFL,
          mesh: Mesh | None = None) -> ValueGrid:
    """Backward explicit stepping from W(T) = Phi; `time_steps=None` picks the smallest stable L."""
    kind = Kind(kind)
    mesh = mesh or build_mesh(spec.domain, h)
    limit = stable_time_step(spec, mesh, cfl)
    if time_steps is None:
        time_steps = max(1, int(np.ceil(spec.T / limit * (1.0 + 1e-12))))
    dt = spec.T / time_steps
    if dt > limit * (1.0 + 1e-12):
        raise CFLViolation(f"dt = {dt:.4g} exceeds the stable bound {limit:.4g} at h = {mesh.h:.4g}"
                           f" (need at least {int(np.ceil(spec.T / limit))} time steps)")
    times = np.linspace(0.0, spec.T, time_steps + 1)
    values = np.empty((time_steps + 1, mesh.node_count))
    values[-1] = spec.coeffs.Phi(mesh.points)
    stepper = IsaacsStepper(spec, mesh, kind)
    with timed(log, f"{kind} Isaacs solve of {spec.name} ({time_steps} steps, {mesh.node_count} nodes)"):
        for k in range(time_steps - 1, -1, -1):
            values[k] = stepper.step(times[k + 1], dt, values[k + 1])
            peak = np.max(np.abs(values[k]))
            if not np.isfinite(peak) or peak > DIVERGENCE_BOUND:
                raise Divergence(f"|W| reached {peak:.3e} at t = {times[k]:.4g}")
            if k % 5000 == 0:
                log.debug("layer %d, t=%.4f, max |W| = %.4g", k, times[k], peak)
    return ValueGrid(times, mesh, values, kind, {"scheme": "explicit-monotone", "cfl": cfl, "problem": spec.name})


def grid_from_function(spec: ProblemSpec, kind: Kind, h: float, time_steps: int,
                       value: Callable[[float, np.ndarray], np.ndarray]) -> ValueGrid:
    """Grid holding an analytic value(t, x) on the solver's mesh, e.g. for residual checks."""
    mesh = build_mesh(spec.domain, h)
    times = np.linspace(0.0, spec.T, time_steps + 1)
    values = np.stack([np.asarray(value(t, mesh.points), dtype=float) for t in times])
    return ValueGrid(times, mesh, values, Kind(kind), {"scheme": "analytic", "problem": spec.name})


def feedback_indices(spec: ProblemSpec, grid: ValueGrid, layer: int) -> tuple[np.ndarray, np.ndarray]:
    """Argmax/argmin control indices per node used to step from layer `layer + 1` to `layer`."""
    layer = min(layer, len(grid.times) - 2)
    stepper = IsaacsStepper(spec, grid.mesh, grid.kind)
    return stepper.controls(grid.times[layer + 1], grid.values[layer + 1])
