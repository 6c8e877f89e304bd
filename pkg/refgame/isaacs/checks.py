# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from refgame.dynamics import ProblemSpec
from refgame.errors import MeshMismatch
from refgame.isaacs.mesh import build_mesh
from refgame.isaacs.scheme import DEFAULT_CFL, IsaacsStepper, stable_time_step
from refgame.log import get_child_logger
from refgame.model.value_grid import Kind, ValueGrid
from refgame.streams import Purpose, generator

log = get_child_logger("isaacs-checks")

COMPARISON_TOL = 1e-12
_PROBE_STREAM = 50


@dataclass(slots=True, frozen=True)
class GridComparison:
    max_difference: float
    """max over nodes of grid1 - grid2."""
    tol: float
    witness: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_difference <= self.tol


def comparison_check(grid1: ValueGrid, grid2: ValueGrid, tol: float = COMPARISON_TOL,
                     same_kind: bool = True) -> GridComparison:
    """Pointwise ordering grid1 <= grid2 + tol.

    `same_kind=False` allows comparing a lower grid with an upper one.
    """
    if not grid1.mesh.same_as(grid2.mesh) or not np.array_equal(grid1.times, grid2.times):
        raise MeshMismatch(f"grids live on different meshes ({grid1.header()} vs {grid2.header()})")
    if same_kind and grid1.kind != grid2.kind:
        raise MeshMismatch(f"grids of different kinds ({grid1.kind} vs {grid2.kind})")
    difference = grid1.values - grid2.values
    layer, node = np.unravel_index(int(np.argmax(difference)), difference.shape)
    worst = float(difference[layer, node])
    witness = {"t": float(grid1.times[layer]), "x": grid1.mesh.points[node].tolist()}
    log.info("comparison: max(grid1 - grid2) = %.3e at %s", worst, witness)
    return GridComparison(worst, tol, witness)


@dataclass(slots=True, frozen=True)
class MonotonicityProbe:
    min_response: float
    """Smallest change of any output node after raising one input node."""
    probes: int

    @property
    def passed(self) -> bool:
        return self.min_response >= -1e-14


def monotonicity_probe(spec: ProblemSpec,
                       kind: Kind,
                       h: float,
                       seed: int = 0,
                       probes: int = 10,
                       bump: float = 1e-3,
                       cfl: float = DEFAULT_CFL) -> MonotonicityProbe:
    """Raise single input nodes of one stable step and record the smallest output change."""
    mesh = build_mesh(spec.domain, h)
    dt = stable_time_step(spec, mesh, cfl)
    dt = min(dt, spec.T)
    stepper = IsaacsStepper(spec, mesh, kind)
    noise = generator(seed, _PROBE_STREAM, Purpose.PROBES).uniform(-0.1, 0.1, mesh.node_count)
    layer = spec.coeffs.Phi(mesh.points) + noise
    base = stepper.step(spec.T, dt, layer)
    nodes = generator(seed, _PROBE_STREAM + 1, Purpose.PROBES).choice(mesh.node_count,
                                                                      size=min(probes, mesh.node_count),
                                                                      replace=False)
    worst = np.inf
    for node in nodes:
        raised = layer.copy()
        raised[node] += bump
        worst = min(worst, float(np.min(stepper.step(spec.T, dt, raised) - base)))
    log.info("monotonicity probe on %d nodes: smallest response %.3e", len(nodes), worst)
    return MonotonicityProbe(worst, len(nodes))
