# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(slots=True, frozen=True)
class TimeChange:
    """The clock psi_s = A_s + s - A_t, its inverse tau and the densities a = d(tau)/dr, b = 1 - a.

    With this normalization psi_t = t, so the r-grid covers [t, psi_T].
    """

    s: np.ndarray
    """Base grid t = s_0 < ... < s_K = T."""
    A: np.ndarray  # pylint: disable=invalid-name
    """The increasing process sampled on `s`."""
    psi: np.ndarray
    r: np.ndarray
    """Uniform grid of [t, psi_T]."""
    tau: np.ndarray
    """tau sampled on `r`."""
    a: np.ndarray
    """Density of tau on `r`, in (0, 1]."""
    b: np.ndarray
    """1 - a on `r`."""

    @property
    def t(self) -> float:
        return float(self.s[0])

    def psi_at(self, s) -> np.ndarray:
        return np.interp(s, self.s, self.psi)

    def A_at(self, s) -> np.ndarray:  # pylint: disable=invalid-name
        return np.interp(s, self.s, self.A)

    def tau_at(self, r) -> np.ndarray:
        """Exact inverse of the piecewise-linear psi, located by bisection."""
        r = np.asarray(r, dtype=float)
        index = np.clip(np.searchsorted(self.psi, r, side="right") - 1, 0, len(self.s) - 2)
        width = self.psi[index + 1] - self.psi[index]
        slope = (self.s[index + 1] - self.s[index]) / width
        return self.s[index] + (r - self.psi[index]) * slope

    def a_at(self, r) -> np.ndarray:
        return np.interp(r, self.r, self.a)

    def b_at(self, r) -> np.ndarray:
        return 1.0 - self.a_at(r)

    def cell_densities(self, r_nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Finite-difference slopes of tau over the cells of `r_nodes`, and their complements."""
        a = np.diff(self.tau_at(r_nodes)) / np.diff(r_nodes)
        a = np.clip(a, DENSITY_FLOOR, 1.0)
        return a, 1.0 - a

    def round_trip_error(self) -> float:
        """max |psi(tau(r)) - r| over the r-grid."""
        return float(np.max(np.abs(self.psi_at(self.tau) - self.r)))

    def clock_budget_error(self, eps) -> np.ndarray:
        """(tau_{t+eps} - t) + (A_{tau_{t+eps}} - A_t) - eps, zero up to interpolation error."""
        eps = np.asarray(eps, dtype=float)
        stop = self.tau_at(self.t + eps)
        return (stop - self.t) + (self.A_at(stop) - self.A[0]) - eps


DENSITY_FLOOR = 1e-9
