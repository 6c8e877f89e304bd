# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Discrete viscosity residuals of a value grid.

A small residual is a necessary sign of a viscosity solution, never a proof of
one: the definition quantifies over all smooth test functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from refgame.dynamics import ProblemSpec
from refgame.isaacs.scheme import IsaacsStepper
from refgame.log import get_child_logger
from refgame.model.value_grid import ValueGrid

log = get_child_logger("residual")


@dataclass(slots=True, frozen=True)
class ResidualGrid:
    """Residuals per (layer, node); the terminal layer is zero."""

    grid: ValueGrid
    interior: np.ndarray
    """dW/dt + H at every node, with the ghost-eliminated stencil at boundary nodes."""
    neumann: np.ndarray
    """dW/dn + F at boundary nodes, NaN at interior nodes."""

    @property
    def subsolution(self) -> np.ndarray:
        return np.where(self.grid.mesh.boundary, np.fmax(self.interior, self.neumann), self.interior)

    @property
    def supersolution(self) -> np.ndarray:
        return np.where(self.grid.mesh.boundary, np.fmin(self.interior, self.neumann), self.interior)

    def summary(self) -> dict:
        boundary = self.grid.mesh.boundary
        return {
            "max_abs_interior": float(np.max(np.abs(self.interior[:, ~boundary]))),
            "max_abs_neumann": float(np.max(np.abs(self.neumann[:, boundary]))),
            "max_abs_boundary_interior": float(np.max(np.abs(self.interior[:, boundary]))),
            "max_subsolution": float(np.max(self.subsolution)),
            "min_supersolution": float(np.min(self.supersolution)),
        }

    def to_frame(self) -> pd.DataFrame:
        frame = self.grid.to_frame()
        frame["interior"] = self.interior.ravel()
        frame["neumann"] = self.neumann.ravel()
        frame["subsolution"] = self.subsolution.ravel()
        frame["supersolution"] = self.supersolution.ravel()
        return frame.drop(columns="value")


def viscosity_residual(grid: ValueGrid, spec: ProblemSpec) -> ResidualGrid:
    """Residuals with the stencils of the solver: the time derivative forward, H at the later layer."""
    stepper = IsaacsStepper(spec, grid.mesh, grid.kind)
    layers, nodes = grid.values.shape
    interior = np.zeros((layers, nodes))
    neumann = np.full((layers, nodes), np.nan)
    neumann[:, grid.mesh.boundary] = 0.0
    boundary = grid.mesh.boundary
    for k in range(layers - 1):
        t_next = grid.times[k + 1]
        later = grid.values[k + 1]
        dt = grid.times[k + 1] - grid.times[k]
        interior[k] = (later - grid.values[k]) / dt + stepper.hamiltonian(t_next, later)
        slope = stepper.stencil.normal_derivative(grid.values[k])
        flux = stepper.flux(grid.times[k], grid.values[k])
        neumann[k, boundary] = (slope + flux)[boundary]
    residual = ResidualGrid(grid, interior, neumann)
    log.info("residuals of the %s grid: %s", grid.kind, residual.summary())
    return residual
