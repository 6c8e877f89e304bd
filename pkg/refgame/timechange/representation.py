# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Small-horizon limit (Y^eps_t - y) / eps of GBSDEs stopped at tau_{t+eps}.

The limit is a_t g(t, y, z) + b_t f(t, y). A is either a deterministic
function of time or the local time of the reflected state.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
import pandas as pd

from refgame import rsde
from refgame.dynamics import ProblemSpec
from refgame.dynamics.policy import ConstantPolicy
from refgame.gbsde import SchemeOptions, backward_sweep, controls_along, gbsde_driver
from refgame.gbsde.regression import RegressionSpec
from refgame.log import get_child_logger
from refgame.streams import path_normals
from refgame.timechange import DEFAULT_EPSILONS, AFunction, build

log = get_child_logger("representation")

COLUMNS = ["epsilon", "estimate", "target", "abs_error", "stderr"]
_CLOCK_NODES = 4001


def brownian_paths(normals: np.ndarray, dt: np.ndarray) -> np.ndarray:
    """Cumulative sums B_k - B_t, shape (N, M + 1, d)."""
    increments = normals * np.sqrt(dt)[None, :, None]
    paths = np.zeros((normals.shape[0], normals.shape[1] + 1, normals.shape[2]))
    np.cumsum(increments, axis=1, out=paths[:, 1:])
    return paths


def _check_epsilons(eps_list: Sequence[float]) -> np.ndarray:
    eps = np.asarray(eps_list, dtype=float)
    if eps.ndim != 1 or len(eps) == 0 or np.any(eps <= 0):
        raise ValueError(f"epsilons must be a nonempty list of positive reals, got {eps_list}")
    return eps


def representation_limit(spec: ProblemSpec,
                         t: float,
                         y: float,
                         z: Sequence[float],
                         a_function: AFunction | None,
                         eps_list: Sequence[float] = DEFAULT_EPSILONS,
                         path_count: int = 10_000,
                         steps: int = 200,
                         seed: int = 0,
                         x0=None,
                         reg: RegressionSpec = RegressionSpec(),
                         options: SchemeOptions = SchemeOptions(),
                         threads: int = 1) -> pd.DataFrame:
    """Table of (epsilon, estimate, target, abs_error, stderr).

    With `a_function` None, A is the local time of the reflected state started
    at (t, x0) and the densities are estimated per path before averaging.
    """
    eps = _check_epsilons(eps_list)
    x0 = np.zeros(spec.state_dimension) if x0 is None else np.asarray(x0, dtype=float)
    z_vec = np.asarray(z, dtype=float).reshape(spec.brownian_dimension)
    if a_function is None:
        rows = _local_time_rows(spec, t, y, z_vec, eps, path_count, steps, seed, x0, reg, options, threads)
    else:
        rows = _deterministic_rows(spec, t, y, z_vec, a_function, eps, path_count, steps, seed, x0, reg, options,
                                   threads)
    table = pd.DataFrame(rows, columns=COLUMNS)
    log.info("representation limit at t = %g: final abs error %.4g (target %.6g)", t, table["abs_error"].iloc[-1],
             table["target"].iloc[-1])
    return table


def _deterministic_rows(spec, t, y, z, a_function, eps, path_count, steps, seed, x0, reg, options, threads):
    c = spec.coeffs
    s_grid = np.linspace(t, t + eps.max(), _CLOCK_NODES)
    clock = build(s_grid, a_function(s_grid))
    if np.any(t + eps > clock.psi[-1] + 1e-12):
        raise ValueError("every epsilon must satisfy eps <= psi_T - t")
    a_t, b_t = float(clock.a[0]), float(clock.b[0])
    x = np.repeat(x0[None, :], path_count, axis=0)
    u = spec.controls_U.repeat(0, path_count)
    v = spec.controls_V.repeat(0, path_count)
    y_col, z_row = np.full(1, y), z[None, :]
    target = float(a_t * c.g(t, x0[None, :], y_col, z_row, u[:1], v[:1])[0] +
                   b_t * c.f(t, x0[None, :], y_col, u[:1], v[:1])[0])
    normals = path_normals(seed, path_count, steps, spec.brownian_dimension, antithetic=True, threads=threads)

    rows = []
    for epsilon in eps:
        stop_time = float(clock.tau_at(t + epsilon))
        times = rsde.uniform_grid(t, stop_time, steps)
        dt = np.diff(times)
        d_a = np.diff(a_function(times))
        B = brownian_paths(normals, dt)  # pylint: disable=invalid-name

        def driver(k, active, yv, zv, expect, times=times, dt=dt, d_a=d_a):
            return (c.g(times[k], x[active], yv, zv, u[active], v[active]) * dt[k] +
                    c.f(times[k], x[active], yv, u[active], v[active]) * d_a[k])

        implicit = options.implicit(c.lambda1, c.lambda2, float(dt.max()), float(d_a.max()))
        solution = backward_sweep(times, B, np.diff(B, axis=1), dt, y + B[:, -1] @ z, driver, reg, implicit, options)
        estimate = (solution.value - y) / epsilon
        rows.append([float(epsilon), estimate, target, abs(estimate - target), solution.stderr / epsilon])
    return rows


def _local_time_rows(spec, t, y, z, eps, path_count, steps, seed, x0, reg, options, threads):
    c = spec.coeffs
    u_policy, v_policy = ConstantPolicy(spec.controls_U), ConstantPolicy(spec.controls_V)
    ensemble = rsde.simulate(spec,
                             u_policy,
                             v_policy,
                             t,
                             x0,
                             path_count,
                             steps,
                             seed,
                             horizon=t + float(eps.max()),
                             threads=threads)
    times, eta = ensemble.times, ensemble.eta
    B = np.zeros((path_count, steps + 1, spec.brownian_dimension))  # pylint: disable=invalid-name
    np.cumsum(ensemble.dB, axis=1, out=B[:, 1:])
    # per-path densities from the first cell of each clock
    a_paths = ensemble.dt[0] / (ensemble.dt[0] + ensemble.d_eta[:, 0])
    x_t = ensemble.X[:, 0]
    u, v = controls_along(ensemble, u_policy, v_policy)
    y_col = np.full(path_count, y)
    z_rows = np.repeat(z[None, :], path_count, axis=0)
    target = float(
        np.mean(a_paths * c.g(t, x_t, y_col, z_rows, u[0], v[0]) + (1.0 - a_paths) * c.f(t, x_t, y_col, u[0], v[0])))
    psi = eta + times[None, :]
    features = np.concatenate([ensemble.X, B], axis=2)
    driver = gbsde_driver(spec, ensemble, u, v)
    implicit = options.implicit(c.lambda1, c.lambda2, float(ensemble.dt.max()), float(ensemble.d_eta.max()))

    rows = []
    for epsilon in eps:
        # psi is increasing per path: the first node with psi >= t + eps is the stopping step
        stop = np.array([np.searchsorted(row, t + epsilon - 1e-12) for row in psi])
        stop = np.clip(stop, 1, steps)
        terminal = y + B[np.arange(path_count), stop] @ z
        solution = backward_sweep(times, features, ensemble.dB, ensemble.dt, terminal, driver, reg, implicit, options,
                                  stop)
        estimate = (solution.value - y) / epsilon
        rows.append([float(epsilon), estimate, target, abs(estimate - target), solution.stderr / epsilon])
    return rows
