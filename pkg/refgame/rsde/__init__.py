# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Projected Euler scheme for the controlled reflected SDE.

A step moves the state by drift and noise and projects the tentative state back
onto closure(O); the projection distance is the local-time increment, which is
exact bookkeeping because grad phi is the unit inward normal on the boundary.
"""

from __future__ import annotations

import numpy as np

from refgame.dynamics import ProblemSpec
from refgame.dynamics.policy import Policy
from refgame.errors import InvalidInitialState
from refgame.log import get_child_logger
from refgame.model.ensemble import PathEnsemble
from refgame.parallel import chunk_bounds, ordered_map
from refgame.streams import Purpose, normal_block

log = get_child_logger("rsde")


def advance(spec: ProblemSpec, t: float, dt: float, x: np.ndarray, u: np.ndarray, v: np.ndarray,
            dB: np.ndarray) -> tuple[np.ndarray, np.ndarray]:  # pylint: disable=invalid-name
    """One projected Euler step for a batch: states (N, n), controls (N, m), increments (N, d)."""
    c = spec.coeffs
    tentative = x + c.b(t, x, u, v) * dt + np.einsum("kij,kj->ki", c.sigma(t, x, u, v), dB)
    return spec.domain.project_points(tentative)


def step(spec: ProblemSpec, x, u, v, t: float, dt: float, dB) -> tuple[np.ndarray, float]:  # pylint: disable=invalid-name
    """Single-state step, returning the new state and the local-time increment."""
    if dt <= 0:
        raise ValueError(f"the time step must be positive, got {dt}")
    x = np.asarray(x, dtype=float).reshape(1, -1)
    u = np.asarray(u, dtype=float).reshape(1, -1)
    v = np.asarray(v, dtype=float).reshape(1, -1)
    dB = np.asarray(dB, dtype=float).reshape(1, -1)
    point, overshoot = advance(spec, t, dt, x, u, v, dB)
    return point[0], float(overshoot[0])


def uniform_grid(t0: float, horizon: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise ValueError(f"the step count must be positive, got {steps}")
    if not horizon > t0:
        raise ValueError(f"the horizon {horizon} must lie after the start time {t0}")
    times = t0 + (horizon - t0) * np.arange(steps + 1) / steps
    times[-1] = horizon
    return times


def initial_states(spec: ProblemSpec, x0, path_count: int) -> np.ndarray:
    """Initial states per path, shape (N, n), from one state or one per path."""
    x0 = np.asarray(x0, dtype=float)
    n = spec.state_dimension
    states = np.broadcast_to(x0.reshape(-1, n), (path_count, n)).copy() if x0.size == n else x0.reshape(path_count, n)
    phi = spec.domain.phi(states)
    if np.any(phi < -spec.domain.boundary_tol):
        worst = int(np.argmin(phi))
        raise InvalidInitialState(f"initial state {states[worst].tolist()} lies outside the domain"
                                  f" (phi = {phi[worst]:.3e})")
    return states


def simulate(spec: ProblemSpec,
             u_policy: Policy,
             v_policy: Policy,
             t0: float,
             x0,
             path_count: int,
             steps: int,
             seed: int,
             horizon: float | None = None,
             threads: int = 1,
             antithetic: bool = False,
             purpose: Purpose = Purpose.PATHS,
             grid: np.ndarray | None = None) -> PathEnsemble:
    """Simulate `path_count` reflected paths from (t0, x0) on a uniform grid of `steps` steps up to `horizon`.

    An explicit `grid` replaces the uniform one; it then fixes t0 and the step count.

    Path i is driven by the stream (seed, purpose, i) only, so the ensemble does
    not depend on `threads`.
    """
    if path_count < 1:
        raise ValueError(f"the path count must be positive, got {path_count}")
    if grid is None:
        times = uniform_grid(t0, spec.T if horizon is None else horizon, steps)
    else:
        times = np.asarray(grid, dtype=float)
        steps = len(times) - 1
    start = initial_states(spec, x0, path_count)
    d = spec.brownian_dimension
    sqrt_dt = np.sqrt(np.diff(times))

    def run(bounds: tuple[int, int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        lo, hi = bounds
        dB = normal_block(seed, bounds, steps, d, purpose, antithetic) * sqrt_dt[None, :, None]  # pylint: disable=invalid-name
        X = np.empty((hi - lo, steps + 1, spec.state_dimension))  # pylint: disable=invalid-name
        eta = np.zeros((hi - lo, steps + 1))
        X[:, 0] = start[lo:hi]
        for k in range(steps):
            t, x = times[k], X[:, k]
            X[:, k + 1], overshoot = advance(spec, t, times[k + 1] - t, x, u_policy(t, x), v_policy(t, x), dB[:, k])
            eta[:, k + 1] = eta[:, k] + overshoot
        return X, eta, dB

    blocks = ordered_map(run, chunk_bounds(path_count), threads)
    ensemble = PathEnsemble(times=times,
                            X=np.concatenate([b[0] for b in blocks]),
                            eta=np.concatenate([b[1] for b in blocks]),
                            dB=np.concatenate([b[2] for b in blocks]),
                            seed=seed)
    log.debug("simulated %d paths x %d steps on [%g, %g], mean eta_T %.4g", path_count, steps, times[0], times[-1],
              float(ensemble.eta[:, -1].mean()))
    return ensemble
