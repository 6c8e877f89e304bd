# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Closed catalog of parametric coefficient families.

Every family is a small immutable callable, vectorized over a leading sample
axis: states x have shape (N, n), controls u, v shape (N, m), values y shape
(N,) and z shape (N, d). Time enters as a scalar.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from typing import Any

import numpy as np

from refgame.errors import NotOverriddenError


def _first(control: np.ndarray) -> np.ndarray:
    return control[:, 0] if control.shape[1] else np.zeros(len(control))


def _spread(control: np.ndarray, n: int) -> np.ndarray:
    """Controls as state-shaped vectors: component-wise when m == n, first component otherwise."""
    if control.shape[1] == n:
        return control
    return np.repeat(_first(control)[:, None], n, axis=1)


def _vector(values: Sequence[float] | None, size: int, name: str) -> np.ndarray:
    if values is None:
        return np.zeros(size)
    vector = np.asarray(values, dtype=float).ravel()
    if len(vector) == 1 and size > 1:
        return np.full(size, vector[0])
    if len(vector) != size:
        raise ValueError(f"'{name}' needs {size} entries, got {len(vector)}")
    return vector


class Family:
    """A named, parametrized coefficient."""

    NAME: str = ""
    PARAMS_SCHEMA: dict = {}

    def __init__(self, **params: Any) -> None:
        self.params = dict(params)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.params})"

    def configure(self, state_dim: int, brownian_dim: int) -> None:
        """Resolve parameter shapes once the dimensions are known."""


_FLOAT = {"type": "float", "default": 0.0}
_FLOAT_LIST = {"type": "list", "schema": {"type": "float"}, "nullable": True, "default": None}

# --- drift b(t, x, u, v)


class Drift(Family):

    def __call__(self, t: float, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        raise NotOverriddenError()


class ZeroDrift(Drift):
    NAME = "zero"

    def __call__(self, t, x, u, v):
        return np.zeros_like(x)


class LinearDrift(Drift):
    """b = A x + c + k_u u + k_v v."""

    NAME = "linear"
    PARAMS_SCHEMA = {
        "matrix": {
            "type": "list",
            "nullable": True,
            "default": None
        },
        "offset": _FLOAT_LIST,
        "gain_u": _FLOAT,
        "gain_v": _FLOAT,
    }

    def configure(self, state_dim, brownian_dim):
        matrix = self.params.get("matrix")
        self.matrix = np.zeros((state_dim, state_dim)) if matrix is None else np.asarray(
            matrix, dtype=float).reshape(state_dim, state_dim)
        self.offset = _vector(self.params.get("offset"), state_dim, "offset")
        self.gain_u = float(self.params.get("gain_u", 0.0))
        self.gain_v = float(self.params.get("gain_v", 0.0))

    def __call__(self, t, x, u, v):
        n = x.shape[1]
        return x @ self.matrix.T + self.offset + self.gain_u * _spread(u, n) + self.gain_v * _spread(v, n)


class ConstantDrift(LinearDrift):
    NAME = "constant"
    PARAMS_SCHEMA = {"offset": _FLOAT_LIST}


# --- diffusion sigma(t, x, u, v), shape (N, n, d)


class Diffusion(Family):

    def __call__(self, t: float, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        raise NotOverriddenError()


class ConstantDiffusion(Diffusion):
    """sigma = s * I_{n x d}, or a full n x d matrix."""

    NAME = "constant"
    PARAMS_SCHEMA = {
        "scale": {
            "type": "float",
            "default": 1.0
        },
        "matrix": {
            "type": "list",
            "nullable": True,
            "default": None
        },
    }

    def configure(self, state_dim, brownian_dim):
        matrix = self.params.get("matrix")
        if matrix is None:
            self.matrix = float(self.params.get("scale", 1.0)) * np.eye(state_dim, brownian_dim)
        else:
            self.matrix = np.asarray(matrix, dtype=float).reshape(state_dim, brownian_dim)

    def __call__(self, t, x, u, v):
        return np.broadcast_to(self.matrix, (len(x),) + self.matrix.shape).copy()


class AffineDiffusion(Diffusion):
    """Diagonal sigma_ii = scale + slope * x_i + k_u u_i + k_v v_i (n = d)."""

    NAME = "affine"
    PARAMS_SCHEMA = {
        "scale": {
            "type": "float",
            "default": 1.0
        },
        "slope": _FLOAT,
        "gain_u": _FLOAT,
        "gain_v": _FLOAT,
    }

    def configure(self, state_dim, brownian_dim):
        if state_dim != brownian_dim:
            raise ValueError("the affine diffusion needs as many Brownian components as state components")
        self.scale = float(self.params.get("scale", 1.0))
        self.slope = float(self.params.get("slope", 0.0))
        self.gain_u = float(self.params.get("gain_u", 0.0))
        self.gain_v = float(self.params.get("gain_v", 0.0))

    def _diagonal(self, x, u, v):
        n = x.shape[1]
        return self.scale + self.slope * x + self.gain_u * _spread(u, n) + self.gain_v * _spread(v, n)

    def __call__(self, t, x, u, v):
        diagonal = self._diagonal(x, u, v)
        return diagonal[:, :, None] * np.eye(x.shape[1])


class ClampDiffusion(AffineDiffusion):
    """Diagonal sigma_ii = clip(scale * x_i, lower, upper)."""

    NAME = "clamp"
    PARAMS_SCHEMA = {
        "scale": {
            "type": "float",
            "default": 1.0
        },
        "lower": {
            "type": "float",
            "default": -1.0
        },
        "upper": {
            "type": "float",
            "default": 1.0
        },
    }

    def configure(self, state_dim, brownian_dim):
        super().configure(state_dim, brownian_dim)
        self.lower = float(self.params.get("lower", -1.0))
        self.upper = float(self.params.get("upper", 1.0))

    def _diagonal(self, x, u, v):
        return np.clip(self.scale * x, self.lower, self.upper)


# --- generator g(t, x, y, z, u, v)


class Generator(Family):

    def __call__(self, t: float, x: np.ndarray, y: np.ndarray, z: np.ndarray, u: np.ndarray,
                 v: np.ndarray) -> np.ndarray:
        raise NotOverriddenError()


class AffineGenerator(Generator):
    """g = c + a y + <z_coef, z> + <x_coef, x> + k_u u + k_v v + k_uv u v + k_uu u^2 + k_vv v^2.

    Control terms act on the first control component.
    """

    NAME = "affine"
    PARAMS_SCHEMA = {
        "constant": _FLOAT,
        "y": _FLOAT,
        "z": _FLOAT_LIST,
        "x": _FLOAT_LIST,
        "u": _FLOAT,
        "v": _FLOAT,
        "uv": _FLOAT,
        "uu": _FLOAT,
        "vv": _FLOAT,
    }

    def configure(self, state_dim, brownian_dim):
        p = self.params
        self.constant = float(p.get("constant", 0.0))
        self.y_coef = float(p.get("y", 0.0))
        self.z_coef = _vector(p.get("z"), brownian_dim, "z")
        self.x_coef = _vector(p.get("x"), state_dim, "x")
        self.control = tuple(float(p.get(key, 0.0)) for key in ("u", "v", "uv", "uu", "vv"))

    def _controls(self, u, v):
        ku, kv, kuv, kuu, kvv = self.control
        u0, v0 = _first(u), _first(v)
        return ku * u0 + kv * v0 + kuv * u0 * v0 + kuu * u0 * u0 + kvv * v0 * v0

    def __call__(self, t, x, y, z, u, v):
        return (self.constant + self.y_coef * y + z @ self.z_coef + x @ self.x_coef + self._controls(u, v))


class QuadraticGenerator(Generator):
    """g = c + q y^2; not monotone in y, kept for auditing."""

    NAME = "quadratic"
    PARAMS_SCHEMA = {"constant": _FLOAT, "q": {"type": "float", "default": 1.0}}

    def configure(self, state_dim, brownian_dim):
        self.constant = float(self.params.get("constant", 0.0))
        self.q = float(self.params.get("q", 1.0))

    def __call__(self, t, x, y, z, u, v):
        return self.constant + self.q * y * y


# --- boundary cost f(t, x, y, u, v)


class BoundaryCost(Family):

    def __call__(self, t: float, x: np.ndarray, y: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        raise NotOverriddenError()


class AffineBoundaryCost(BoundaryCost):
    """f = c + a y + <x_coef, x> + k_u u + k_v v + k_uv u v."""

    NAME = "affine"
    PARAMS_SCHEMA = {
        "constant": _FLOAT,
        "y": _FLOAT,
        "x": _FLOAT_LIST,
        "u": _FLOAT,
        "v": _FLOAT,
        "uv": _FLOAT,
    }

    def configure(self, state_dim, brownian_dim):
        p = self.params
        self.constant = float(p.get("constant", 0.0))
        self.y_coef = float(p.get("y", 0.0))
        self.x_coef = _vector(p.get("x"), state_dim, "x")
        self.control = tuple(float(p.get(key, 0.0)) for key in ("u", "v", "uv"))

    def __call__(self, t, x, y, u, v):
        ku, kv, kuv = self.control
        u0, v0 = _first(u), _first(v)
        return self.constant + self.y_coef * y + x @ self.x_coef + ku * u0 + kv * v0 + kuv * u0 * v0


# --- terminal payoff Phi(x)


class Terminal(Family):

    def __call__(self, x: np.ndarray) -> np.ndarray:
        raise NotOverriddenError()


class ConstantTerminal(Terminal):
    NAME = "constant"
    PARAMS_SCHEMA = {"value": _FLOAT}

    def __call__(self, x):
        return np.full(len(x), float(self.params.get("value", 0.0)))


class CosineTerminal(Terminal):
    """Phi = offset + amplitude * cos(pi <k, x>), k defaulting to the first unit vector."""

    NAME = "cosine"
    PARAMS_SCHEMA = {
        "amplitude": {
            "type": "float",
            "default": 1.0
        },
        "offset": _FLOAT,
        "wavenumber": _FLOAT_LIST,
    }

    def configure(self, state_dim, brownian_dim):
        wavenumber = self.params.get("wavenumber")
        self.wavenumber = np.eye(state_dim)[0] if wavenumber is None else _vector(wavenumber, state_dim, "wavenumber")
        self.amplitude = float(self.params.get("amplitude", 1.0))
        self.offset = float(self.params.get("offset", 0.0))

    def __call__(self, x):
        return self.offset + self.amplitude * np.cos(np.pi * (x @ self.wavenumber))


class QuadraticTerminal(Terminal):
    NAME = "quadratic"
    PARAMS_SCHEMA = {"constant": _FLOAT, "coefficient": {"type": "float", "default": 1.0}}

    def __call__(self, x):
        constant = float(self.params.get("constant", 0.0))
        return constant + float(self.params.get("coefficient", 1.0)) * np.sum(x * x, axis=1)


class LinearTerminal(Terminal):
    NAME = "linear"
    PARAMS_SCHEMA = {"constant": _FLOAT, "weights": _FLOAT_LIST}

    def configure(self, state_dim, brownian_dim):
        weights = self.params.get("weights")
        self.weights = np.eye(state_dim)[0] if weights is None else _vector(weights, state_dim, "weights")
        self.constant = float(self.params.get("constant", 0.0))

    def __call__(self, x):
        return self.constant + x @ self.weights


# --- shifted copies, for ordered problem pairs


class ShiftedGenerator(Generator):
    """g + shift."""

    NAME = "shifted"

    def __init__(self, base: Generator, shift: float) -> None:
        super().__init__(shift=shift)
        self.base = base
        self.shift = float(shift)

    def __call__(self, t, x, y, z, u, v):
        return self.base(t, x, y, z, u, v) + self.shift


class ShiftedTerminal(Terminal):
    """Phi + shift."""

    NAME = "shifted"

    def __init__(self, base: Terminal, shift: float) -> None:
        super().__init__(shift=shift)
        self.base = base
        self.shift = float(shift)

    def __call__(self, x):
        return self.base(x) + self.shift


FAMILIES: Mapping[str, Mapping[str, type[Family]]] = {
    "drift": {c.NAME: c for c in (ZeroDrift, ConstantDrift, LinearDrift)},
    "diffusion": {c.NAME: c for c in (ConstantDiffusion, AffineDiffusion, ClampDiffusion)},
    "generator": {c.NAME: c for c in (AffineGenerator, QuadraticGenerator)},
    "boundary_cost": {c.NAME: c for c in (AffineBoundaryCost,)},
    "terminal": {c.NAME: c for c in (ConstantTerminal, CosineTerminal, QuadraticTerminal, LinearTerminal)},
}
