# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd


@dataclass(slots=True, frozen=True)
class PathEnsemble:
    """Reflected paths on a time grid, with local time and driving Brownian increments."""

    times: np.ndarray
    """Increasing grid t0 = times[0] < ... < times[M], shape (M + 1,)."""
    X: np.ndarray  # pylint: disable=invalid-name
    """States, shape (N, M + 1, n)."""
    eta: np.ndarray
    """Cumulative local time, shape (N, M + 1), eta[:, 0] == 0."""
    dB: np.ndarray  # pylint: disable=invalid-name
    """Brownian increments, shape (N, M, d)."""
    seed: int

    @property
    def t0(self) -> float:
        return float(self.times[0])

    @property
    def path_count(self) -> int:
        return self.X.shape[0]

    @property
    def steps(self) -> int:
        return len(self.times) - 1

    @property
    def dt(self) -> np.ndarray:
        return np.diff(self.times)

    @property
    def d_eta(self) -> np.ndarray:
        """Local time increments per step, shape (N, M)."""
        return np.diff(self.eta, axis=1)

    def at_step(self, k: int) -> np.ndarray:
        return self.X[:, k, :]

    def to_frame(self) -> pd.DataFrame:
        """Long table (path, step, t, x..., eta), paths outermost."""
        n_paths, n_nodes, n = self.X.shape
        frame = pd.DataFrame({
            "path": np.repeat(np.arange(n_paths), n_nodes),
            "step": np.tile(np.arange(n_nodes), n_paths),
            "t": np.tile(self.times, n_paths),
        })
        for i in range(n):
            frame[f"x{i}"] = self.X[:, :, i].ravel()
        frame["eta"] = self.eta.ravel()
        return frame

    def head(self, k: int) -> PathEnsemble:
        """The ensemble restricted to the first k steps."""
        return PathEnsemble(self.times[:k + 1], self.X[:, :k + 1], self.eta[:, :k + 1], self.dB[:, :k], self.seed)
