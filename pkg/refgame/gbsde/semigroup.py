# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""The backward semigroup G_{t,s}[xi] and its flow property."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from refgame import rsde
from refgame.dynamics import ProblemSpec
from refgame.dynamics.policy import Policy
from refgame.gbsde import SchemeOptions, solve_on_ensemble
from refgame.gbsde.regression import RegressionSpec
from refgame.log import get_child_logger
from refgame.streams import Purpose

log = get_child_logger("semigroup")

Functional = Callable[[np.ndarray], np.ndarray]


@dataclass(slots=True, frozen=True)
class SemigroupValue:
    value: float
    stderr: float


@dataclass(slots=True, frozen=True)
class FlowResult:
    direct: float
    """G_{t,T}[Phi(X_T)]."""
    nested: float
    """G_{t,s}[Y_s], Y_s from an independent ensemble on [s, T]."""
    residual: float
    stderr: float
    s: float
    """The grid time actually used as the intermediate time."""

    def within(self, sigmas: float = 3.0, bias: float = 0.02) -> bool:
        return self.residual <= sigmas * self.stderr + bias


def semigroup_G(spec: ProblemSpec,  # pylint: disable=invalid-name
                t: float,
                x,
                u_policy: Policy,
                v_policy: Policy,
                s: float,
                xi: Functional,
                path_count: int,
                steps: int,
                seed: int,
                reg: RegressionSpec = RegressionSpec(),
                options: SchemeOptions = SchemeOptions(),
                threads: int = 1) -> SemigroupValue:
    """Ŷ_t of the GBSDE on [t, s] with terminal xi(X_s)."""
    if not t <= s <= spec.T:
        raise ValueError(f"need t <= s <= T, got t = {t}, s = {s}, T = {spec.T}")
    if s == t:
        return SemigroupValue(float(xi(np.asarray(x, dtype=float).reshape(1, -1))[0]), 0.0)
    ensemble = rsde.simulate(spec, u_policy, v_policy, t, x, path_count, steps, seed, horizon=s, threads=threads)
    solution = solve_on_ensemble(ensemble, spec, u_policy, v_policy, xi, reg, options)
    return SemigroupValue(solution.value, solution.stderr)


def flow_check(spec: ProblemSpec,
               t: float,
               x,
               u_policy: Policy,
               v_policy: Policy,
               s: float,
               path_count: int,
               steps: int,
               seed: int,
               reg: RegressionSpec = RegressionSpec(),
               options: SchemeOptions = SchemeOptions(),
               threads: int = 1) -> FlowResult:
    """Compare G_{t,T}[Phi(X_T)] with G_{t,s}[G_{s,T}[Phi]] on one outer ensemble.

    The inner values Y_s come from a second ensemble on [s, T], one inner path
    started at every outer X_s and driven by independent noise, regressed on
    its starting states.
    """
    if not t < s < spec.T:
        raise ValueError(f"need t < s < T, got t = {t}, s = {s}, T = {spec.T}")
    outer = rsde.simulate(spec, u_policy, v_policy, t, x, path_count, steps, seed, threads=threads)
    direct = solve_on_ensemble(outer, spec, u_policy, v_policy, spec.coeffs.Phi, reg, options)

    k_s = min(max(int(round((s - t) / (spec.T - t) * steps)), 1), steps - 1)
    inner = rsde.simulate(spec,
                          u_policy,
                          v_policy,
                          0.0,
                          outer.X[:, k_s],
                          path_count,
                          steps - k_s,
                          seed,
                          threads=threads,
                          purpose=Purpose.INNER_PATHS,
                          grid=outer.times[k_s:])
    y_s = solve_on_ensemble(inner, spec, u_policy, v_policy, spec.coeffs.Phi, reg, options).Y[:, 0]

    nested = solve_on_ensemble(outer.head(k_s), spec, u_policy, v_policy, None, reg, options, terminal_values=y_s)
    residual = abs(direct.value - nested.value)
    log.info("flow at t = %g via s = %g: direct %.6g, nested %.6g, residual %.3g (stderr %.3g)", t, outer.times[k_s],
             direct.value, nested.value, residual, direct.stderr)
    return FlowResult(direct.value, nested.value, residual, direct.stderr, float(outer.times[k_s]))
