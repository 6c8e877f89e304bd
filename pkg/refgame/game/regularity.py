# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Fitted continuity moduli of a value grid in space and in time."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from refgame.log import get_child_logger
from refgame.model.value_grid import ValueGrid

log = get_child_logger("regularity")

MIN_SEPARATIONS = 4
SLACK_TOL = 1e-12
COLUMNS = ["direction", "separation", "omega", "modulus", "fitted", "slack"]


def space_modulus(r: np.ndarray) -> np.ndarray:
    return r + np.sqrt(r)


def time_modulus(r: np.ndarray) -> np.ndarray:
    return np.sqrt(r) + r**0.25


@dataclass(slots=True, frozen=True)
class RegularityReport:
    table: pd.DataFrame
    C_x: float  # pylint: disable=invalid-name
    C_t: float  # pylint: disable=invalid-name

    @property
    def passed(self) -> bool:
        counts = self.table.groupby("direction").size()
        enough = all(counts.get(d, 0) >= MIN_SEPARATIONS for d in ("x", "t"))
        return bool(enough and np.isfinite(self.C_x) and np.isfinite(self.C_t) and (self.table["slack"] >= -SLACK_TOL).all())

    def summary(self) -> dict:
        return {"C_x": self.C_x, "C_t": self.C_t, "passed": self.passed, "separations": len(self.table)}


def _space_oscillation(grid: ValueGrid, shift: int) -> float:
    """max |W(t, x) - W(t, x')| over layers and in-domain node pairs `shift` nodes apart along an axis."""
    mesh = grid.mesh
    box = np.full((len(grid.times), int(np.prod(mesh.shape))), np.nan)
    box[:, mesh.box_index] = grid.values
    box = box.reshape((len(grid.times),) + mesh.shape)
    worst = 0.0
    for axis in range(1, box.ndim):
        head = [slice(None)] * box.ndim
        tail = [slice(None)] * box.ndim
        head[axis] = slice(shift, None)
        tail[axis] = slice(None, -shift)
        difference = np.abs(box[tuple(head)] - box[tuple(tail)])
        if np.any(np.isfinite(difference)):
            worst = max(worst, float(np.nanmax(difference)))
    return worst


def _time_oscillation(grid: ValueGrid, shift: int) -> float:
    return float(np.max(np.abs(grid.values[shift:] - grid.values[:-shift])))


def _fit(direction: str, separations: list[float], omegas: list[float], modulus) -> tuple[list[dict], float]:
    """C from the coarser half of the separations; the finer half is held out and may show negative slack."""
    if not separations:
        return [], np.inf
    r = np.asarray(separations)
    omega = np.asarray(omegas)
    bound = modulus(r)
    fitted = r >= np.sort(r)[len(r) // 2]
    constant = float(np.max(omega[fitted] / bound[fitted]))
    rows = [{
        "direction": direction,
        "separation": float(sep),
        "omega": float(o),
        "modulus": float(m),
        "fitted": bool(used),
        "slack": float(constant * m - o)
    } for sep, o, m, used in zip(r, omega, bound, fitted)]
    return rows, constant


def regularity_check(W: ValueGrid) -> RegularityReport:  # pylint: disable=invalid-name
    """C with omega(r) <= C (r + r^1/2) in x and omega(r) <= C (r^1/2 + r^1/4) in t over dyadic r.

    Each C is the smallest one dominating the coarser half of the separations;
    the finer half tests it out of sample.
    """
    mesh = W.mesh
    x_seps, x_omegas = [], []
    shift = 1
    while shift < max(mesh.shape) // 2 + 1:
        x_seps.append(shift * mesh.h)
        x_omegas.append(_space_oscillation(W, shift))
        shift *= 2
    t_seps, t_omegas = [], []
    shift = 1
    while shift < len(W.times):
        t_seps.append(shift * W.dt)
        t_omegas.append(_time_oscillation(W, shift))
        shift *= 2

    x_rows, c_x = _fit("x", x_seps, x_omegas, space_modulus)
    t_rows, c_t = _fit("t", t_seps, t_omegas, time_modulus)
    report = RegularityReport(pd.DataFrame.from_records(x_rows + t_rows, columns=COLUMNS), c_x, c_t)
    log.info("regularity of the %s grid: %s", W.kind, report.summary())
    return report
