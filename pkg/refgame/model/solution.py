# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(slots=True, frozen=True)
class BackwardSolution:
    """Discrete solution (Y, Z) of a backward equation on a path ensemble."""

    times: np.ndarray
    Y: np.ndarray  # pylint: disable=invalid-name
    """Values, shape (N, M + 1); Y[:, M] (or Y at the stopping step) is the terminal value."""
    Z: np.ndarray  # pylint: disable=invalid-name
    """Martingale integrands, shape (N, M, d)."""
    condition: np.ndarray
    """Condition number of the regression of every step, shape (M,)."""
    stderr: float
    """Monte Carlo standard error of the initial value."""
    iterations: np.ndarray
    """Fixed-point iterations spent per step, shape (M,)."""

    @property
    def value(self) -> float:
        """The initial value Y_t, averaged over paths."""
        return float(self.Y[:, 0].mean())

    def summary(self) -> dict:
        return {
            "t": float(self.times[0]),
            "value": self.value,
            "stderr": self.stderr,
            "paths": int(self.Y.shape[0]),
            "steps": int(self.Y.shape[1] - 1),
            "max_condition": float(self.condition.max()) if len(self.condition) else 1.0,
            "max_iterations": int(self.iterations.max()) if len(self.iterations) else 0,
        }
