# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""The GBSDE in the original clock against the BSDE in the changed clock, and the commutation of integrals."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from refgame import rsde
from refgame.dynamics import ProblemSpec
from refgame.gbsde import SchemeOptions, backward_sweep
from refgame.gbsde.regression import RegressionSpec
from refgame.log import get_child_logger
from refgame.model.time_change import TimeChange
from refgame.streams import path_normals
from refgame.timechange import AFunction, build
from refgame.timechange.representation import brownian_paths

log = get_child_logger("equivalence")

COMMUTATION_NODES = 20_001
COMMUTATION_TOL = 1e-6
_CLOCK_CELLS = 20_000
_MERGE_TOL = 1e-12

Terminal = Callable[[np.ndarray], np.ndarray]
"""Terminal value as a function of B_T - B_t, shape (N, d) -> (N,)."""


@dataclass(slots=True, frozen=True)
class EquivalenceResult:
    original: float
    changed: float
    difference: float
    stderr: float


def _shared_brownian(seed: int, path_count: int, dim: int, *time_sets: np.ndarray,
                     threads: int = 1) -> list[np.ndarray]:
    """One Brownian motion B - B_t sampled on the union of `time_sets`, returned per set."""
    merged = np.unique(np.concatenate(time_sets))
    merged = merged[np.concatenate([[True], np.diff(merged) > _MERGE_TOL])]
    normals = path_normals(seed, path_count, len(merged) - 1, dim, threads=threads)
    B = brownian_paths(normals, np.diff(merged))  # pylint: disable=invalid-name
    picked = []
    for times in time_sets:
        index = np.clip(np.searchsorted(merged, times + _MERGE_TOL, side="right") - 1, 0, len(merged) - 1)
        picked.append(B[:, index])
    return picked


def equivalence_check(spec: ProblemSpec,
                      a_function: AFunction,
                      t: float,
                      horizon: float,
                      terminal: Terminal,
                      path_count: int,
                      steps: int,
                      seed: int,
                      reg: RegressionSpec = RegressionSpec(),
                      options: SchemeOptions = SchemeOptions(),
                      threads: int = 1,
                      clock: TimeChange | None = None) -> EquivalenceResult:
    """|Y_t - Ỹ_t| for the GBSDE on [t, horizon] and its time-changed BSDE on [t, psi_horizon].

    The GBSDE runs on a uniform s-grid; the changed BSDE runs on its own
    uniform r-grid with generator a g + b f against dr and driver B_tau,
    whose increments have variance d(tau). Both read one Brownian path
    sampled at the s-nodes and at tau(r-nodes). `clock` replaces the
    changed side's clock, which is built from `a_function` by default.
    """
    c = spec.coeffs
    s_grid = rsde.uniform_grid(t, horizon, steps)
    d_a = np.diff(a_function(s_grid))
    if clock is None:
        fine = rsde.uniform_grid(t, horizon, max(steps, _CLOCK_CELLS))
        clock = build(fine, a_function(fine))
    r_grid = rsde.uniform_grid(t, float(clock.psi[-1]), steps)
    tau = clock.tau_at(r_grid)
    a_cell, b_cell = clock.cell_densities(r_grid)
    ds, dr, d_tau = np.diff(s_grid), np.diff(r_grid), np.diff(tau)

    x = np.zeros((path_count, spec.state_dimension))
    u = spec.controls_U.repeat(0, path_count)
    v = spec.controls_V.repeat(0, path_count)
    # pylint: disable-next=invalid-name
    B, B_tau = _shared_brownian(seed, path_count, spec.brownian_dimension, s_grid, tau, threads=threads)
    xi = terminal(B[:, -1])

    def original(k, active, y, z, expect):
        return (c.g(s_grid[k], x[active], y, z, u[active], v[active]) * ds[k] +
                c.f(s_grid[k], x[active], y, u[active], v[active]) * d_a[k])

    def changed(k, active, y, z, expect):
        return (a_cell[k] * c.g(tau[k], x[active], y, z, u[active], v[active]) +
                b_cell[k] * c.f(tau[k], x[active], y, u[active], v[active])) * dr[k]

    implicit = options.implicit(c.lambda1, c.lambda2, float(max(ds.max(), dr.max())), float(max(d_a.max(), 0.0)))
    first = backward_sweep(s_grid, B, np.diff(B, axis=1), ds, xi, original, reg, implicit, options)
    second = backward_sweep(r_grid, B_tau, np.diff(B_tau, axis=1), np.maximum(d_tau, _MERGE_TOL), xi, changed, reg,
                            implicit, options)
    difference = abs(first.value - second.value)
    log.info("clock equivalence on [%g, %g]: %.8g vs %.8g, difference %.3g", t, horizon, first.value, second.value,
             difference)
    return EquivalenceResult(first.value, second.value, difference, first.stderr)


def commutation_check(clock: TimeChange, integrand: Callable[[np.ndarray], np.ndarray], r_end: float,
                      nodes: int = COMMUTATION_NODES) -> float:
    """|int_t^{tau_r} H dA - int_t^r H(tau) b dr| by midpoint sums on fine grids, for deterministic A."""
    t = clock.t
    s_fine = np.linspace(t, float(clock.tau_at(r_end)), nodes)
    left = float(np.sum(integrand(0.5 * (s_fine[1:] + s_fine[:-1])) * np.diff(clock.A_at(s_fine))))
    r_fine = np.linspace(t, r_end, nodes)
    _, b_cell = clock.cell_densities(r_fine)
    tau_mid = clock.tau_at(0.5 * (r_fine[1:] + r_fine[:-1]))
    right = float(np.sum(integrand(tau_mid) * b_cell * np.diff(r_fine)))
    return abs(left - right)
