# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Semi-Lagrangian dynamic programming over one-step feedback strategies, and the principle checks.

A one-step strategy of the minimizer is a map U_h -> V_h; over finite grids
the infimum over such maps of the maximum over u equals max_u min_v, so the
recursion takes the max-min (lower) or min-max (upper) of the one-step
objective node by node.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable
from dataclasses import dataclass
from refgame._compat import StrEnum

import numpy as np
import pandas as pd

from refgame import rsde
from refgame.dynamics import ProblemSpec
from refgame.dynamics.policy import ConstantPolicy
from refgame.game.quadrature import DPPConfig, StopRule
from refgame.gbsde import SchemeOptions, solve_on_ensemble
from refgame.gbsde.regression import RegressionSpec
from refgame.isaacs.hamiltonian import game_table, reduce_table
from refgame.isaacs.mesh import build_mesh
from refgame.log import get_child_logger, timed
from refgame.model.value_grid import Kind, Mesh, ValueGrid
from refgame.parallel import chunk_bounds, ordered_map
from refgame.streams import Purpose, generator

log = get_child_logger("dpp")

Interpolant = Callable[[np.ndarray], np.ndarray]

_PROBE_STREAM = 60


@dataclass(slots=True, frozen=True)
class OneStep:
    """One-step objective of a batch of nodes, with the extremes met on the way."""

    table: np.ndarray
    """Shape (P, |U|, |V|)."""
    g_sup: float
    f_sup: float
    overshoot: float


def one_step(spec: ProblemSpec, t: float, x: np.ndarray, following: Interpolant, delta: float, weights: np.ndarray,
             increments: np.ndarray) -> OneStep:
    """E[W(t + delta, X')] + g delta + f E[d(eta)] per node and control pair.

    X' is one projected Euler step from x with increment sqrt(delta) * increments,
    the expectation is the quadrature (weights, increments).
    """
    count, nodes = len(x), len(weights)
    dB = increments * np.sqrt(delta)  # pylint: disable=invalid-name
    starts = np.repeat(x, nodes, axis=0)
    noise = np.tile(dB, (count, 1))
    extremes = {"g": 0.0, "f": 0.0, "overshoot": 0.0}
    coeffs = spec.coeffs

    def objective(u, v):
        landed, overshoot = rsde.advance(spec, t, delta, starts, np.repeat(u, nodes, axis=0),
                                         np.repeat(v, nodes, axis=0), noise)
        w = following(landed).reshape(count, nodes)
        y = w @ weights
        z = ((w * weights) @ dB) / delta
        local = overshoot.reshape(count, nodes) @ weights
        running = coeffs.g(t, x, y, z, u, v)
        boundary = coeffs.f(t, x, y, u, v)
        extremes["g"] = max(extremes["g"], float(np.max(np.abs(running))))
        if np.any(local):
            extremes["f"] = max(extremes["f"], float(np.max(np.abs(boundary[local > 0]))))
            extremes["overshoot"] = max(extremes["overshoot"], float(overshoot.max()))
        return y + running * delta + boundary * local

    table = game_table(spec, count, objective)
    return OneStep(table, extremes["g"], extremes["f"], extremes["overshoot"])


def dpp_value(spec: ProblemSpec,
              kind: Kind,
              mesh: Mesh | float,
              config: DPPConfig,
              seed: int = 0,
              threads: int = 1) -> ValueGrid:
    """Backward recursion W(t_k, x) = max_u min_v (lower) / min_v max_u (upper) of the one-step objective.

    New layers are clamped to the terminal range widened by |g| T + |f| (total
    overshoot), running maxima of the evaluated values.
    """
    kind = Kind(kind)
    mesh = mesh if isinstance(mesh, Mesh) else build_mesh(spec.domain, mesh)
    layers = config.layers(spec.T)
    times = np.linspace(0.0, spec.T, layers + 1)
    weights, increments = config.increments(spec.brownian_dimension, seed)
    values = np.empty((layers + 1, mesh.node_count))
    values[-1] = spec.coeffs.Phi(mesh.points)
    low, high = float(values[-1].min()), float(values[-1].max())
    g_sup = f_sup = overshoot_total = 0.0
    chunks = chunk_bounds(mesh.node_count)

    with timed(log, f"{kind} dpp recursion of {spec.name} ({layers} steps, {mesh.node_count} nodes)"):
        for k in range(layers - 1, -1, -1):
            following = mesh.interpolator(values[k + 1])
            steps = ordered_map(
                lambda bounds, k=k, following=following: one_step(spec, times[k], mesh.points[bounds[0]:bounds[1]],
                                                                  following, config.delta, weights, increments),
                chunks, threads)
            layer, _, _ = reduce_table(np.concatenate([s.table for s in steps]), kind)
            g_sup = max([g_sup] + [s.g_sup for s in steps])
            f_sup = max([f_sup] + [s.f_sup for s in steps])
            overshoot_total += max(s.overshoot for s in steps)
            margin = g_sup * spec.T + f_sup * overshoot_total
            values[k] = np.clip(layer, low - margin, high + margin)
    return ValueGrid(times, mesh, values, kind, {
        "scheme": "semi-lagrangian",
        "delta": config.delta,
        "quadrature": config.quadrature.value,
        "quadrature_points": len(weights),
        "problem": spec.name,
    })


def strategy_value(table, kind: Kind) -> float:
    """Value of the one-step game by enumerating every strategy map.

    Lower: min over maps beta: U_h -> V_h of max_u J(u, beta(u)). Upper: max over
    maps alpha: V_h -> U_h of min_v J(alpha(v), v).
    """
    table = np.asarray(table, dtype=float)
    rows, columns = table.shape
    match Kind(kind):
        case Kind.LOWER:
            return min(
                max(table[u, beta[u]] for u in range(rows)) for beta in itertools.product(range(columns), repeat=rows))
        case Kind.UPPER:
            return max(
                min(table[alpha[v], v]
                    for v in range(columns))
                for alpha in itertools.product(range(rows), repeat=columns))
    raise ValueError(f"no such kind '{kind}'")


class CheckMode(StrEnum):
    WEAK = "weak"
    STRONG = "strong"


@dataclass(slots=True, frozen=True)
class DPPCheck:
    mode: CheckMode
    rows: pd.DataFrame
    """Per probe: t, x..., lhs, rhs, residual, stderr, tau_mean, u_star, v_star."""

    @property
    def mean_residual(self) -> float:
        return float(self.rows["residual"].mean())

    @property
    def max_residual(self) -> float:
        return float(self.rows["residual"].max())

    @property
    def mean_stderr(self) -> float:
        return float(self.rows["stderr"].mean())

    def within(self, sigmas: float = 3.0, bias: float = 0.02) -> bool:
        return self.mean_residual <= sigmas * self.mean_stderr + bias

    def summary(self) -> dict:
        return {
            "mode": self.mode.value,
            "probes": len(self.rows),
            "mean_residual": self.mean_residual,
            "max_residual": self.max_residual,
            "mean_stderr": self.mean_stderr,
        }


def stopping_steps(spec: ProblemSpec, X: np.ndarray, rule: StopRule, fixed: int) -> np.ndarray:  # pylint: disable=invalid-name
    """Stopping step per path: `fixed`, or the first boundary step from `fixed` on, capped at the last one.

    A path started on the boundary therefore runs at least to step `fixed`.
    """
    count, last = X.shape[0], X.shape[1] - 1
    match rule:
        case StopRule.FIXED:
            return np.full(count, fixed, dtype=int)
        case StopRule.BOUNDARY_HIT:
            hit = spec.domain.phi(X.reshape(-1, X.shape[2])).reshape(count, -1) <= spec.domain.boundary_tol
            hit[:, :fixed] = False
            return np.where(hit.any(axis=1), np.argmax(hit, axis=1), last)
    raise ValueError(f"no such stop rule '{rule}'")


def _probe_rhs(spec, kind, W, t, x, rule, config, path_count, seed, reg, options, threads):  # pylint: disable=invalid-name
    grid = t + config.delta / config.substeps * np.arange(config.cap * config.substeps + 1)
    grid = grid[grid <= spec.T + 1e-12]
    grid[-1] = min(grid[-1], spec.T)
    table = np.empty((1, len(spec.controls_U), len(spec.controls_V)))
    errors = np.empty_like(table)
    taus = np.empty_like(table)
    for i in range(len(spec.controls_U)):
        for j in range(len(spec.controls_V)):
            u_policy, v_policy = ConstantPolicy(spec.controls_U, i), ConstantPolicy(spec.controls_V, j)
            ensemble = rsde.simulate(spec, u_policy, v_policy, t, x, path_count, 0, seed, threads=threads, grid=grid)
            stop = stopping_steps(spec, ensemble.X, rule, config.substeps)
            terminal = np.empty(path_count)
            for index in np.unique(stop):
                paths = stop == index
                terminal[paths] = W.value_at(grid[index], ensemble.X[paths, index])
            solution = solve_on_ensemble(ensemble, spec, u_policy, v_policy, None, reg, options, stop=stop,
                                         terminal_values=terminal)
            table[0, i, j] = solution.value
            errors[0, i, j] = solution.stderr
            taus[0, i, j] = float(grid[stop].mean())
    value, u_star, v_star = reduce_table(table, kind)
    pick = (0, int(u_star[0]), int(v_star[0]))
    return float(value[0]), float(errors[pick]), float(taus[pick]), pick[1], pick[2]


def dpp_check(spec: ProblemSpec,
              kind: Kind,
              W: ValueGrid,  # pylint: disable=invalid-name
              mode: CheckMode,
              config: DPPConfig,
              path_count: int,
              seed: int,
              probes: int = 8,
              reg: RegressionSpec = RegressionSpec(),
              options: SchemeOptions = SchemeOptions(),
              threads: int = 1) -> DPPCheck:
    """Compare W(t, x) with max_u min_v G_{t,tau}[W(tau, X_tau)] at sampled grid nodes.

    Controls are held constant on [t, tau]. The weak mode stops at t + delta;
    the strong mode uses the configured stop rule on the same simulated paths,
    so a fixed strong rule reproduces the weak residuals exactly. Probe p is
    simulated with seed + p.
    """
    mode = CheckMode(mode)
    rule = StopRule.FIXED if mode == CheckMode.WEAK else config.stop_rule
    valid_layers = np.flatnonzero(W.times + config.delta <= spec.T + 1e-12)
    if valid_layers.size == 0:
        raise ValueError(f"no layer of the grid leaves room for a step of {config.delta}")
    draw = generator(seed, _PROBE_STREAM, Purpose.PROBES)
    layers = valid_layers[draw.integers(0, valid_layers.size, probes)]
    nodes = draw.integers(0, W.mesh.node_count, probes)

    records = []
    for p, (k, node) in enumerate(zip(layers, nodes)):
        t, x = float(W.times[k]), W.mesh.points[node]
        lhs = float(W.values[k, node])
        rhs, stderr, tau, u_star, v_star = _probe_rhs(spec, kind, W, t, x, rule, config, path_count, seed + p, reg,
                                                      options, threads)
        record = {"t": t}
        record.update({f"x{i}": float(c) for i, c in enumerate(x)})
        record.update({
            "lhs": lhs,
            "rhs": rhs,
            "residual": abs(lhs - rhs),
            "stderr": stderr,
            "tau_mean": tau,
            "u_star": u_star,
            "v_star": v_star
        })
        records.append(record)
        log.debug("probe %d at t=%.4f x=%s: lhs %.6g rhs %.6g", p, t, x, lhs, rhs)
    check = DPPCheck(mode, pd.DataFrame.from_records(records))
    log.info("%s principle check of %s: %s", mode, spec.name, check.summary())
    return check
