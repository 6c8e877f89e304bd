# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Comparison and a priori estimates of the backward solver, measured on shared ensembles."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import pandas as pd

from refgame import rsde
from refgame.dynamics import ProblemSpec
from refgame.dynamics.policy import Policy
from refgame.gbsde import SchemeOptions, controls_along, solve_on_ensemble
from refgame.gbsde.regression import RegressionSpec
from refgame.log import get_child_logger
from refgame.model.ensemble import PathEnsemble
from refgame.model.solution import BackwardSolution

log = get_child_logger("gbsde-checks")

TOL_DETERMINISTIC = 1e-6
TOL_STOCHASTIC = 1e-3

GROWTH_COLUMNS = ["zeta_norm", "moment", "ratio"]


@dataclass(slots=True, frozen=True)
class ComparisonResult:
    violations: int
    max_violation: float
    """max(Y1 - Y2) over all paths and steps, 0 when Y1 <= Y2 everywhere."""
    tol: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def compare_solutions(first: BackwardSolution, second: BackwardSolution, tol: float) -> ComparisonResult:
    excess = first.Y - second.Y
    return ComparisonResult(int(np.count_nonzero(excess > tol)), float(max(excess.max(), 0.0)), tol)


def comparison_check(ensemble: PathEnsemble,
                     spec1: ProblemSpec,
                     spec2: ProblemSpec,
                     u_policy: Policy,
                     v_policy: Policy,
                     reg: RegressionSpec = RegressionSpec(),
                     tol: float | None = None) -> ComparisonResult:
    """Solve both problems on the shared ensemble and count points with Y1 > Y2 + tol."""
    if tol is None:
        tol = TOL_DETERMINISTIC if ensemble.path_count == 1 else TOL_STOCHASTIC
    first = solve_on_ensemble(ensemble, spec1, u_policy, v_policy, spec1.coeffs.Phi, reg)
    second = solve_on_ensemble(ensemble, spec2, u_policy, v_policy, spec2.coeffs.Phi, reg)
    result = compare_solutions(first, second, tol)
    log.info("comparison %s vs %s: %d violation(s), max excess %.3g", spec1.name, spec2.name, result.violations,
             result.max_violation)
    return result


def _source_norms(ensemble: PathEnsemble, spec: ProblemSpec, u_policy: Policy, v_policy: Policy) -> tuple[float, float]:
    """Ê sum |g(., 0, 0)|^2 dt and Ê sum |f(., 0)|^2 d(eta)."""
    c = spec.coeffs
    u, v = controls_along(ensemble, u_policy, v_policy)
    count, d = ensemble.path_count, spec.brownian_dimension
    zero, zero_z = np.zeros(count), np.zeros((count, d))
    g_term = f_term = 0.0
    for k in range(ensemble.steps):
        t, x = ensemble.times[k], ensemble.X[:, k]
        g_term += float(np.mean(c.g(t, x, zero, zero_z, u[k], v[k])**2)) * float(ensemble.dt[k])
        f_term += float(np.mean(c.f(t, x, zero, u[k], v[k])**2 * ensemble.d_eta[:, k]))
    return g_term, f_term


def apriori_constant(ensemble: PathEnsemble,
                     spec: ProblemSpec,
                     u_policy: Policy,
                     v_policy: Policy,
                     reg: RegressionSpec = RegressionSpec(),
                     options: SchemeOptions = SchemeOptions()) -> float:
    """Smallest C with sup_k Ê|Y_k|^2 <= C (1 + Ê|xi|^2 + Ê int |g(.,0,0)|^2 dt + Ê int |f(.,0)|^2 d(eta))."""
    solution = solve_on_ensemble(ensemble, spec, u_policy, v_policy, spec.coeffs.Phi, reg, options)
    g_term, f_term = _source_norms(ensemble, spec, u_policy, v_policy)
    data = 1.0 + float(np.mean(solution.Y[:, -1]**2)) + g_term + f_term
    constant = float(np.max(np.mean(solution.Y**2, axis=0))) / data
    log.info("a priori estimate of %s: C = %.4g", spec.name, constant)
    return constant


def growth_table(spec: ProblemSpec,
                 u_policy: Policy,
                 v_policy: Policy,
                 initial_states: Sequence,
                 t: float,
                 path_count: int,
                 steps: int,
                 seed: int,
                 reg: RegressionSpec = RegressionSpec(),
                 threads: int = 1) -> pd.DataFrame:
    """Ê[sup_k |Y_k|^2 + sum_k |Z_k|^2 dt] / (1 + |zeta|^2) across initial states."""
    rows = []
    for zeta in initial_states:
        ensemble = rsde.simulate(spec, u_policy, v_policy, t, zeta, path_count, steps, seed, threads=threads)
        solution = solve_on_ensemble(ensemble, spec, u_policy, v_policy, spec.coeffs.Phi, reg)
        z_energy = np.sum(np.sum(solution.Z**2, axis=2) * ensemble.dt[None, :], axis=1)
        moment = float(np.mean(np.max(solution.Y**2, axis=1) + z_energy))
        norm = float(np.linalg.norm(zeta))
        rows.append([norm, moment, moment / (1.0 + norm**2)])
    return pd.DataFrame(rows, columns=GROWTH_COLUMNS)


def difference_ratio(ensemble: PathEnsemble,
                     spec1: ProblemSpec,
                     spec2: ProblemSpec,
                     u_policy: Policy,
                     v_policy: Policy,
                     reg: RegressionSpec = RegressionSpec()) -> float:
    """Difference estimate in its shared-ensemble form.

    Returns the ratio of Ê[sup|Y1 - Y2|^2 + sum |Z1 - Z2|^2 dt] to
    Ê|xi1 - xi2|^2 + Ê sum |g1 - g2|^2(Y2, Z2) dt + Ê sum |f1 - f2|^2(Y2) d(eta),
    or 0 when both sides vanish.
    """
    first = solve_on_ensemble(ensemble, spec1, u_policy, v_policy, spec1.coeffs.Phi, reg)
    second = solve_on_ensemble(ensemble, spec2, u_policy, v_policy, spec2.coeffs.Phi, reg)
    u, v = controls_along(ensemble, u_policy, v_policy)
    dy, dz = first.Y - second.Y, first.Z - second.Z
    left = float(
        np.mean(np.max(dy**2, axis=1) + np.sum(np.sum(dz**2, axis=2) * ensemble.dt[None, :], axis=1)))
    right = float(np.mean(dy[:, -1]**2))
    c1, c2 = spec1.coeffs, spec2.coeffs
    for k in range(ensemble.steps):
        t, x, y, z = ensemble.times[k], ensemble.X[:, k], second.Y[:, k], second.Z[:, k]
        dg = c1.g(t, x, y, z, u[k], v[k]) - c2.g(t, x, y, z, u[k], v[k])
        df = c1.f(t, x, y, u[k], v[k]) - c2.f(t, x, y, u[k], v[k])
        right += float(np.mean(dg**2)) * float(ensemble.dt[k]) + float(np.mean(df**2 * ensemble.d_eta[:, k]))
    if right == 0:
        return 0.0 if left == 0 else float("inf")
    return left / right
