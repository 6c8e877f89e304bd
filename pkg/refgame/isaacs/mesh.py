# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from refgame.geometry import Domain
from refgame.log import get_child_logger
from refgame.model.value_grid import Mesh

log = get_child_logger("mesh")

MAX_DIMENSION = 3


def build_mesh(domain: Domain, h: float) -> Mesh:
    """Tensor mesh of width (close to) h over the bounding box of `domain`.

    Nodes with phi >= -boundary_tol are in the domain; boundary nodes are the
    in-domain nodes missing at least one axis neighbor.
    """
    n = domain.dimension
    if n > MAX_DIMENSION:
        raise ValueError(f"tensor meshes are limited to dimension {MAX_DIMENSION}, got {n}")
    if not h > 0:
        raise ValueError(f"mesh width must be positive, got {h}")
    lo, hi = domain.bounding_box()
    count = int(np.rint((hi[0] - lo[0]) / h)) + 1
    if count < 3:
        raise ValueError(f"mesh width {h} leaves fewer than 3 nodes per axis")
    axes = tuple(np.linspace(lo[i], hi[i], count) for i in range(n))
    width = float(axes[0][1] - axes[0][0])
    shape = (count,) * n
    box = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    inside = domain.contains(box)
    box_index = np.flatnonzero(inside)
    number = np.full(len(box), -1)
    number[box_index] = np.arange(len(box_index))

    multi = np.stack(np.unravel_index(box_index, shape), axis=1)
    plus = np.full((n, len(box_index)), -1)
    minus = np.full((n, len(box_index)), -1)
    for i in range(n):
        for step, target in ((1, plus), (-1, minus)):
            moved = multi.copy()
            moved[:, i] += step
            valid = (moved[:, i] >= 0) & (moved[:, i] < count)
            flat = np.ravel_multi_index(tuple(np.clip(moved, 0, count - 1).T), shape)
            target[i] = np.where(valid, number[flat], -1)

    boundary = np.any(plus < 0, axis=0) | np.any(minus < 0, axis=0)
    points = box[box_index]
    normals = np.zeros_like(points)
    if boundary.any():
        normals[boundary] = domain.inward_normal(points[boundary])
    if boundary.all() or not boundary.any():
        raise ValueError(f"mesh of width {h} needs interior and boundary nodes"
                         f" (got {int((~boundary).sum())} interior, {int(boundary.sum())} boundary)")
    _, fill = cKDTree(points).query(box)
    log.debug("mesh of %s: h=%.4g, %d nodes (%d on the boundary)", domain.name, width, len(points), boundary.sum())
    return Mesh(axes=axes,
                h=width,
                points=points,
                box_index=box_index,
                boundary=boundary,
                normals=normals,
                plus=plus,
                minus=minus,
                fill_index=np.asarray(fill))


@dataclass(slots=True, frozen=True)
class Derivatives:
    """Discrete derivatives of one layer at every node."""

    central: np.ndarray
    """Central gradient, shape (P, n)."""
    forward: np.ndarray
    backward: np.ndarray
    hessian: np.ndarray
    """Shape (P, n, n), symmetric."""

    def upwind(self, drift: np.ndarray) -> np.ndarray:
        return np.where(drift > 0, self.forward, self.backward)


class Stencil:
    """Difference operators of a mesh, with Neumann ghost values at missing neighbors.

    The ghost of a node along axis i in direction s is W - s h n_i F, where n is
    the inward normal and F the boundary nonlinearity at that node.
    """

    def __init__(self, mesh: Mesh) -> None:
        self.mesh = mesh
        own = np.arange(mesh.node_count)
        self.has_plus = mesh.plus >= 0
        self.has_minus = mesh.minus >= 0
        self.plus = np.where(self.has_plus, mesh.plus, own)
        self.minus = np.where(self.has_minus, mesh.minus, own)

    def neighbors(self, values: np.ndarray, flux: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Axis neighbor values (n, P) in + and - direction, ghosts filled in."""
        h, normals = self.mesh.h, self.mesh.normals.T
        up = np.where(self.has_plus, values[self.plus], values - h * normals * flux)
        down = np.where(self.has_minus, values[self.minus], values + h * normals * flux)
        return up, down

    def derivatives(self, values: np.ndarray, flux: np.ndarray) -> Derivatives:
        h = self.mesh.h
        n = self.mesh.dimension
        up, down = self.neighbors(values, flux)
        central = ((up - down) / (2.0 * h)).T
        forward = ((up - values) / h).T
        backward = ((values - down) / h).T
        hessian = np.empty((len(values), n, n))
        for i in range(n):
            hessian[:, i, i] = (up[i] - 2.0 * values + down[i]) / h**2
            for j in range(i + 1, n):
                hessian[:, i, j] = hessian[:, j, i] = 0.5 * (self._mixed(central, i, j) + self._mixed(central, j, i))
        return Derivatives(central, forward, backward, hessian)

    def _mixed(self, central: np.ndarray, i: int, j: int) -> np.ndarray:
        """d/dx_i of the central d/dx_j, one-sided where an axis-i neighbor is missing."""
        width = self.mesh.h * (self.has_plus[i].astype(float) + self.has_minus[i].astype(float))
        return (central[self.plus[i], j] - central[self.minus[i], j]) / np.where(width > 0, width, np.inf)

    def normal_derivative(self, values: np.ndarray) -> np.ndarray:
        """Derivative along the inward normal at every node (zero at interior nodes).

        Axes missing a neighbor use the one-sided second-order difference into
        the domain, first order when only one inward neighbor exists.
        """
        mesh = self.mesh
        h = mesh.h
        gradient = np.zeros((mesh.node_count, mesh.dimension))
        for i in range(mesh.dimension):
            both = self.has_plus[i] & self.has_minus[i]
            gradient[both, i] = (values[self.plus[i]] - values[self.minus[i]])[both] / (2.0 * h)
            for step, has, inward in ((1, self.has_plus[i], self.minus[i]), (-1, self.has_minus[i], self.plus[i])):
                missing = ~has & (inward != np.arange(mesh.node_count))
                first = inward
                second_exists = (mesh.minus[i] if step == 1 else mesh.plus[i])[first] >= 0
                second = (self.minus[i] if step == 1 else self.plus[i])[first]
                two_sided = (3.0 * values - 4.0 * values[first] + values[second]) / (2.0 * h)
                one_sided = (values - values[first]) / h
                slope = step * np.where(second_exists, two_sided, one_sided)
                gradient[missing, i] = slope[missing]
        return np.where(mesh.boundary, np.sum(gradient * mesh.normals, axis=1), 0.0)
