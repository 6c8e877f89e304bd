# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Hamiltonians H-/H+ and the Neumann nonlinearity, by enumeration of the control grids."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from refgame.dynamics import ProblemSpec
from refgame.log import get_child_logger
from refgame.model.value_grid import Kind
from refgame.streams import Purpose, generator

log = get_child_logger("hamiltonian")

# (u points (P, m), v points (P, m')) -> values (P,)
PairObjective = Callable[[np.ndarray, np.ndarray], np.ndarray]

_GAP_STREAM = 40


@dataclass(slots=True, frozen=True)
class HamiltonianEval:
    value: float
    u_star: int
    v_star: int


def game_table(spec: ProblemSpec, count: int, objective: PairObjective) -> np.ndarray:
    """Objective of every control pair at `count` points, shape (count, |U|, |V|)."""
    table = np.empty((count, len(spec.controls_U), len(spec.controls_V)))
    for i in range(len(spec.controls_U)):
        u = spec.controls_U.repeat(i, count)
        for j in range(len(spec.controls_V)):
            table[:, i, j] = objective(u, spec.controls_V.repeat(j, count))
    return table


def reduce_table(table: np.ndarray, kind: Kind) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Max-min (lower) or min-max (upper) over a (P, |U|, |V|) table, with the optimal indices.

    Ties go to the lowest index, the u choice first.
    """
    rows = np.arange(len(table))
    match Kind(kind):
        case Kind.LOWER:
            u_star = np.argmax(table.min(axis=2), axis=1)
            v_star = np.argmin(table[rows, u_star], axis=1)
        case Kind.UPPER:
            v_star = np.argmin(table.max(axis=1), axis=1)
            u_star = np.argmax(table[rows, :, v_star], axis=1)
    return table[rows, u_star, v_star], u_star, v_star


def hamiltonian_table(spec: ProblemSpec, t: float, x: np.ndarray, y: np.ndarray, p: np.ndarray,
                      a: np.ndarray) -> np.ndarray:
    """1/2 Tr(sigma sigma^T A) + <b, p> + g(t, x, y, sigma^T p, u, v) per sample and control pair."""
    coeffs = spec.coeffs

    def objective(u, v):
        sigma = coeffs.sigma(t, x, u, v)
        second = 0.5 * np.einsum("pik,pjk,pij->p", sigma, sigma, a)
        z = np.einsum("pik,pi->pk", sigma, p)
        return second + np.sum(coeffs.b(t, x, u, v) * p, axis=1) + coeffs.g(t, x, y, z, u, v)

    return game_table(spec, len(x), objective)


def hamiltonian(spec: ProblemSpec, t: float, x, y: float, p, a, kind: Kind) -> HamiltonianEval:
    n = spec.state_dimension
    table = hamiltonian_table(spec, t,
                              np.asarray(x, dtype=float).reshape(1, n),
                              np.array([float(y)]),
                              np.asarray(p, dtype=float).reshape(1, n),
                              np.asarray(a, dtype=float).reshape(1, n, n))
    value, u_star, v_star = reduce_table(table, kind)
    return HamiltonianEval(float(value[0]), int(u_star[0]), int(v_star[0]))


def boundary_nonlinearity(spec: ProblemSpec, t: float, x: np.ndarray, y: np.ndarray,
                          kind: Kind) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """sup_u inf_v f (lower) or inf_v sup_u f (upper) at boundary points."""
    table = game_table(spec, len(x), lambda u, v: spec.coeffs.f(t, x, y, u, v))
    return reduce_table(table, kind)


@dataclass(slots=True, frozen=True)
class GapRanges:
    """Half-widths of the sampling boxes of y, p and the entries of A."""

    y: float = 1.0
    p: float = 1.0
    a: float = 1.0


@dataclass(slots=True, frozen=True)
class GapResult:
    gap: float
    """max |H+ - H-| over the samples."""
    witness: dict = field(default_factory=dict)
    duality_violations: int = 0
    """Samples with H- > H+ (never expected under enumeration)."""
    sample_count: int = 0


def isaacs_gap(spec: ProblemSpec, sample_count: int, seed: int, ranges: GapRanges = GapRanges()) -> GapResult:
    if sample_count < 1:
        raise ValueError(f"sample_count must be at least 1, got {sample_count}")
    n = spec.state_dimension
    draw = [generator(seed, _GAP_STREAM + k, Purpose.AUDIT) for k in range(4)]
    times = draw[0].uniform(0.0, spec.T, sample_count)
    xs = spec.domain.sample_closure(seed, sample_count, stream=_GAP_STREAM)
    ys = draw[1].uniform(-ranges.y, ranges.y, sample_count)
    ps = draw[2].uniform(-ranges.p, ranges.p, (sample_count, n))
    raw = draw[3].uniform(-ranges.a, ranges.a, (sample_count, n, n))
    hessians = 0.5 * (raw + np.swapaxes(raw, 1, 2))

    gap, witness, violations = 0.0, {}, 0
    for s in range(sample_count):
        lower = hamiltonian(spec, times[s], xs[s], ys[s], ps[s], hessians[s], Kind.LOWER)
        upper = hamiltonian(spec, times[s], xs[s], ys[s], ps[s], hessians[s], Kind.UPPER)
        if lower.value > upper.value + 1e-12:
            violations += 1
        difference = abs(upper.value - lower.value)
        if difference > gap or not witness:
            gap = difference
            witness = {
                "t": float(times[s]),
                "x": xs[s].tolist(),
                "y": float(ys[s]),
                "p": ps[s].tolist(),
                "A": hessians[s].tolist(),
                "lower": lower.value,
                "upper": upper.value,
            }
    log.info("Isaacs gap of %s over %d samples: %.3e", spec.name, sample_count, gap)
    return GapResult(gap, witness, violations, sample_count)
