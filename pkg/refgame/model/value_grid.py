# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from dataclasses import dataclass, field
from refgame._compat import StrEnum

import numpy as np
import pandas as pd
from scipy.interpolate import RegularGridInterpolator


class Kind(StrEnum):
    LOWER = "lower"
    UPPER = "upper"


class NodeKind(StrEnum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"


@dataclass(slots=True, frozen=True)
class Mesh:
    """Tensor mesh of the bounding box, restricted to the nodes in closure(O).

    In-domain nodes are numbered in C order of the box; `plus[i]` and
    `minus[i]` hold the number of the axis-i neighbor, -1 where the neighbor is
    missing (a ghost node).
    """

    axes: tuple[np.ndarray, ...]
    h: float
    points: np.ndarray
    """In-domain node coordinates, shape (P, n)."""
    box_index: np.ndarray
    """Flat box position of every in-domain node, shape (P,)."""
    boundary: np.ndarray
    """Boundary flags, shape (P,)."""
    normals: np.ndarray
    """Inward unit normals at the boundary nodes' radial projections, zero elsewhere, shape (P, n)."""
    plus: np.ndarray
    """Axis neighbors in + direction, shape (n, P)."""
    minus: np.ndarray
    fill_index: np.ndarray
    """Nearest in-domain node of every box node, shape (box size,)."""

    @property
    def dimension(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.axes)

    @property
    def node_count(self) -> int:
        return len(self.points)

    def node_kind(self, index: int) -> NodeKind:
        return NodeKind.BOUNDARY if self.boundary[index] else NodeKind.INTERIOR

    def same_as(self, other: Mesh) -> bool:
        return (self.shape == other.shape and self.h == other.h and
                all(np.array_equal(a, b) for a, b in zip(self.axes, other.axes)) and
                np.array_equal(self.box_index, other.box_index))

    def box_values(self, values: np.ndarray) -> np.ndarray:
        """Values on the whole box, outside nodes taking their nearest in-domain value."""
        return np.asarray(values)[self.fill_index].reshape(self.shape)

    def interpolator(self, values: np.ndarray) -> RegularGridInterpolator:
        return RegularGridInterpolator(self.axes, self.box_values(values), method="linear", bounds_error=False,
                                       fill_value=None)

    def nearest_node(self, x: np.ndarray) -> np.ndarray:
        """Number of the in-domain node nearest to each point, shape (N,)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        box = np.stack([np.clip(np.rint((x[:, i] - a[0]) / self.h), 0, len(a) - 1) for i, a in enumerate(self.axes)],
                       axis=1).astype(int)
        return self.fill_index[np.ravel_multi_index(tuple(box.T), self.shape)]


@dataclass(slots=True, frozen=True)
class ValueGrid:
    """Value function on a (time x space) mesh."""

    times: np.ndarray
    """0 = t_0 < ... < t_L = T."""
    mesh: Mesh
    values: np.ndarray
    """Values per layer and node, shape (L + 1, P)."""
    kind: Kind
    meta: dict = field(default_factory=dict)
    """Scheme parameters and mesh metadata."""

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def layer_index(self, t: float) -> int:
        """Index of the time layer nearest to t."""
        return int(np.clip(np.rint((t - self.times[0]) / self.dt), 0, len(self.times) - 1))

    def value_at(self, t: float, x) -> np.ndarray:
        """Multilinear in space, linear in time."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        position = (t - self.times[0]) / self.dt
        if abs(position - np.rint(position)) < 1e-9:
            position = float(np.rint(position))
        k = int(np.clip(np.floor(position), 0, len(self.times) - 2))
        weight = float(np.clip(position - k, 0.0, 1.0))
        lower = self.mesh.interpolator(self.values[k])(x)
        if weight == 0.0:
            return lower
        upper = self.mesh.interpolator(self.values[k + 1])(x)
        return (1.0 - weight) * lower + weight * upper

    def with_values(self, values: np.ndarray, **meta) -> ValueGrid:
        return ValueGrid(self.times, self.mesh, values, self.kind, {**self.meta, **meta})

    def header(self) -> dict:
        return {
            "kind": self.kind.value,
            "h": self.mesh.h,
            "dt": self.dt,
            "layers": len(self.times),
            "nodes": self.mesh.node_count,
            "boundary_nodes": int(self.mesh.boundary.sum()),
            **self.meta,
        }

    def to_frame(self, layers: list[int] | None = None) -> pd.DataFrame:
        """Long table (t, x..., value, node), layers outermost."""
        layers = list(range(len(self.times))) if layers is None else layers
        count = self.mesh.node_count
        frame = pd.DataFrame({"t": np.repeat(self.times[layers], count)})
        for i in range(self.mesh.dimension):
            frame[f"x{i}"] = np.tile(self.mesh.points[:, i], len(layers))
        frame["value"] = self.values[layers].ravel()
        frame["node"] = np.tile(np.where(self.mesh.boundary, NodeKind.BOUNDARY.value, NodeKind.INTERIOR.value),
                                len(layers))
        return frame
