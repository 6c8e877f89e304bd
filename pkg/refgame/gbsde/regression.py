# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Cross-path regression estimators of conditional expectations."""

from __future__ import annotations

from dataclasses import dataclass
from refgame._compat import StrEnum

import numpy as np

from refgame.errors import SingularRegression

MAX_CONDITION = 1e12
_ZERO_SPREAD = 1e-14


class Basis(StrEnum):
    CONSTANT = "constant"
    AFFINE = "affine"
    QUADRATIC = "quadratic"
    BINS = "bins"


@dataclass(slots=True, frozen=True)
class RegressionSpec:
    basis: Basis = Basis.AFFINE
    ridge: float = 0.0
    bins: int = 8
    """Bins per feature axis, used by `Basis.BINS`."""

    def __post_init__(self):
        object.__setattr__(self, "basis", Basis(self.basis))
        if self.ridge < 0:
            raise ValueError(f"the ridge must be nonnegative, got {self.ridge}")
        if self.basis is Basis.BINS and self.bins < 1:
            raise ValueError(f"bins(k) needs k >= 1, got {self.bins}")

    @classmethod
    def from_config(cls, config) -> RegressionSpec:
        return cls(Basis(config.get("basis", Basis.AFFINE)), config.get("ridge", 0.0), config.get("bins", 8))


CONFIG_SCHEMA: dict = {
    "basis": {
        "type": "string",
        "coerce": "strip_str",
        "allowed": [b.value for b in Basis],
        "default": Basis.AFFINE.value,
        "meta": {
            "description": "Regression basis of the conditional expectations"
        },
    },
    "ridge": {
        "type": "float",
        "min": 0.0,
        "default": 0.0,
    },
    "bins": {
        "type": "integer",
        "min": 1,
        "default": 8,
    },
}


class Estimator:
    """Ê[. | features] fitted once per step, applied to any number of targets."""

    condition: float = 1.0

    def __call__(self, target: np.ndarray) -> np.ndarray:
        target = np.asarray(target, dtype=float)
        if target.ndim == 1:
            return self._project_column(target)
        return np.stack([self._project_column(target[:, j]) for j in range(target.shape[1])], axis=1)

    def _project_column(self, column: np.ndarray) -> np.ndarray:
        # constant targets are their own conditional expectation
        if len(column) == 0 or np.all(column == column[0]):
            return column.copy()
        return self._project(column)

    def _project(self, column: np.ndarray) -> np.ndarray:
        return column.copy()


class _Mean(Estimator):

    def _project(self, column):
        return np.full_like(column, column.mean())


class _LeastSquares(Estimator):

    def __init__(self, design: np.ndarray, ridge: float):
        self.design = design
        count = len(design)
        gram = design.T @ design / count
        if ridge > 0:
            penalty = ridge * np.eye(design.shape[1])
            penalty[0, 0] = 0.0
            gram = gram + penalty
        self.condition = float(np.linalg.cond(gram))
        if not np.isfinite(self.condition) or self.condition > MAX_CONDITION:
            raise SingularRegression(f"regression normal equations are rank deficient (condition {self.condition:.3e})"
                                     f" with {design.shape[1]} basis functions on {count} paths")
        self.gram = gram

    def _project(self, column):
        coefficients = np.linalg.solve(self.gram, self.design.T @ column / len(column))
        return self.design @ coefficients


class _Bins(Estimator):

    def __init__(self, cells: np.ndarray):
        _, self.cells = np.unique(cells, axis=0, return_inverse=True)
        self.cells = self.cells.ravel()
        self.counts = np.bincount(self.cells)

    def _project(self, column):
        sums = np.bincount(self.cells, weights=column, minlength=len(self.counts))
        return (sums / self.counts)[self.cells]


def _standardized(features: np.ndarray) -> np.ndarray:
    """Centered and scaled features, columns without spread dropped."""
    features = features.reshape(len(features), -1)
    spread = features.std(axis=0)
    keep = spread > _ZERO_SPREAD * np.maximum(1.0, np.abs(features).max(axis=0))
    return (features[:, keep] - features[:, keep].mean(axis=0)) / spread[keep]


def fit(features: np.ndarray, spec: RegressionSpec) -> Estimator:
    """Estimator of conditional expectations given `features` of shape (N, p)."""
    features = np.asarray(features, dtype=float)
    if len(features) <= 1:
        return Estimator()
    scaled = _standardized(features)
    if scaled.shape[1] == 0 or spec.basis is Basis.CONSTANT:
        return _Mean()
    count, p = scaled.shape
    ones = np.ones((count, 1))
    match spec.basis:
        case Basis.AFFINE:
            return _LeastSquares(np.hstack([ones, scaled]), spec.ridge)
        case Basis.QUADRATIC:
            products = [scaled[:, i] * scaled[:, j] for i in range(p) for j in range(i, p)]
            return _LeastSquares(np.hstack([ones, scaled, np.stack(products, axis=1)]), spec.ridge)
        case Basis.BINS:
            low, high = scaled.min(axis=0), scaled.max(axis=0)
            width = np.where(high > low, (high - low) / spec.bins, 1.0)
            cells = np.minimum(((scaled - low) / width).astype(int), spec.bins - 1)
            return _Bins(cells)
    raise ValueError(f"unknown regression basis: {spec.basis}")
