# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Random time change by the inverse of the clock psi_s = A_s + s - A_t."""

from __future__ import annotations

from collections.abc import Callable, Mapping

import numpy as np

from refgame.errors import ConfigError, NotMonotone
from refgame.log import get_child_logger
from refgame.model.time_change import DENSITY_FLOOR, TimeChange

log = get_child_logger("timechange")

MONOTONE_TOL = 1e-12
DEFAULT_R_GRID = 2001
DEFAULT_EPSILONS = (0.2, 0.1, 0.05, 0.025)


def build(s_grid, A_path, r_grid_size: int = DEFAULT_R_GRID) -> TimeChange:  # pylint: disable=invalid-name
    """Sample psi, tau and the densities (a, b) for a nondecreasing A given on `s_grid`."""
    s = np.asarray(s_grid, dtype=float)
    A = np.asarray(A_path, dtype=float)  # pylint: disable=invalid-name
    if s.ndim != 1 or s.shape != A.shape or len(s) < 2:
        raise ValueError("s_grid and A_path need the same one-dimensional shape with at least two nodes")
    if np.any(np.diff(s) <= 0):
        raise ValueError("s_grid must be strictly increasing")
    if r_grid_size < 2:
        raise ValueError(f"the r-grid needs at least two nodes, got {r_grid_size}")
    drops = np.diff(A)
    if np.any(drops < -MONOTONE_TOL):
        k = int(np.argmin(drops))
        raise NotMonotone(f"A decreases by {-drops[k]:.3e} between s = {s[k]:.6g} and s = {s[k + 1]:.6g}")
    A = np.maximum.accumulate(A)  # pylint: disable=invalid-name
    psi = A - A[0] + s
    r = np.linspace(psi[0], psi[-1], r_grid_size)
    r[-1] = psi[-1]
    partial = TimeChange(s=s, A=A, psi=psi, r=r, tau=np.empty(0), a=np.empty(0), b=np.empty(0))
    tau = partial.tau_at(r)
    a = np.clip(np.gradient(tau, r), DENSITY_FLOOR, 1.0)
    change = TimeChange(s=s, A=A, psi=psi, r=r, tau=tau, a=a, b=1.0 - a)
    log.debug("time change on [%g, %g]: psi_T = %.6g, min a = %.4g", s[0], s[-1], psi[-1], float(a.min()))
    return change


AFunction = Callable[[np.ndarray], np.ndarray]


def zero_A(slope: float = 0.0, knee: float = 0.0) -> AFunction:  # pylint: disable=invalid-name,unused-argument
    return np.zeros_like


def linear_A(slope: float = 1.0, knee: float = 0.0) -> AFunction:  # pylint: disable=invalid-name,unused-argument
    return lambda s: slope * np.asarray(s, dtype=float)


def piecewise_A(slope: float = 1.0, knee: float = 1.0) -> AFunction:  # pylint: disable=invalid-name
    """A_s = 0 before the knee and slope * (s - knee) after it."""
    return lambda s: slope * np.maximum(np.asarray(s, dtype=float) - knee, 0.0)


_a_sources: dict[str, Callable[..., AFunction]] = {
    "zero": zero_A,
    "linear": linear_A,
    "piecewise": piecewise_A,
}


class ASourceFactory:

    @classmethod
    def list_available_sources(cls) -> list[str]:
        return list(_a_sources) + ["local-time"]

    @classmethod
    def is_deterministic(cls, name: str) -> bool:
        return name in _a_sources

    @classmethod
    def get(cls, config: Mapping) -> AFunction:
        name = config.get("type", "piecewise")
        if name not in _a_sources:
            raise ConfigError(f"no such deterministic A '{name}', available are: {', '.join(_a_sources)}",
                              [f"invalid option 'timechange.a_source.type': {name}"])
        return _a_sources[name](config.get("slope", 1.0), config.get("knee", 1.0))
