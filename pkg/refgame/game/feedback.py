# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import threading

import numpy as np

from refgame.dynamics import Player, ProblemSpec
from refgame.isaacs.scheme import IsaacsStepper
from refgame.model.value_grid import ValueGrid


class FeedbackTables:
    """Optimal control indices of a solved grid per layer, computed on first use."""

    def __init__(self, spec: ProblemSpec, grid: ValueGrid) -> None:
        self.spec = spec
        self.grid = grid
        self._stepper = IsaacsStepper(spec, grid.mesh, grid.kind)
        self._tables: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._lock = threading.Lock()

    def indices(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """(u*, v*) per node of the layer nearest to t."""
        layer = min(self.grid.layer_index(t), len(self.grid.times) - 2)
        with self._lock:
            if layer not in self._tables:
                self._tables[layer] = self._stepper.controls(self.grid.times[layer + 1], self.grid.values[layer + 1])
            return self._tables[layer]

    def policy(self, player: Player) -> FeedbackPolicy:
        return FeedbackPolicy(self, player)


class FeedbackPolicy:
    """Control of the nearest mesh node in the nearest time layer."""

    def __init__(self, tables: FeedbackTables, player: Player) -> None:
        self.tables = tables
        self.player = Player(player)
        self.controls = tables.spec.controls_U if self.player == Player.U else tables.spec.controls_V

    def __call__(self, t: float, x: np.ndarray) -> np.ndarray:
        u_star, v_star = self.tables.indices(t)
        chosen = u_star if self.player == Player.U else v_star
        return self.controls.points[chosen[self.tables.grid.mesh.nearest_node(x)]]

    def __repr__(self) -> str:
        return f"FeedbackPolicy({self.player}, {self.tables.grid.kind})"
