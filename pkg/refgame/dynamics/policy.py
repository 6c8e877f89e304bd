# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from typing import Protocol

import numpy as np

from refgame.dynamics import ControlSet


class Policy(Protocol):
    """Feedback control: control points of shape (N, m) for states x of shape (N, n) at time t."""

    def __call__(self, t: float, x: np.ndarray) -> np.ndarray:
        ...


class ConstantPolicy:

    def __init__(self, controls: ControlSet, index: int = 0) -> None:
        if not 0 <= index < len(controls):
            raise IndexError(f"control index {index} out of range for {len(controls)} points")
        self.controls = controls
        self.index = index

    def __call__(self, t: float, x: np.ndarray) -> np.ndarray:
        return self.controls.repeat(self.index, len(x))

    def __repr__(self) -> str:
        return f"ConstantPolicy({self.controls.label}[{self.index}])"


def first_policies(controls_u: ControlSet, controls_v: ControlSet) -> tuple[ConstantPolicy, ConstantPolicy]:
    return ConstantPolicy(controls_u), ConstantPolicy(controls_v)
