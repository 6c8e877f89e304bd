# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import itertools
from dataclasses import dataclass
from refgame._compat import StrEnum

import numpy as np
from numpy.polynomial.hermite import hermgauss

from refgame.log import get_child_logger
from refgame.streams import Purpose, generator, normals

log = get_child_logger("quadrature")

MAX_TENSOR_DIMENSION = 2


class QuadratureRule(StrEnum):
    GAUSS_HERMITE = "gauss-hermite"
    MC = "mc"


class StopRule(StrEnum):
    FIXED = "fixed"
    BOUNDARY_HIT = "boundary-hit-capped"


CONFIG_SCHEMA = {
    "delta": {
        "type": "float",
        "nullable": True,
        "default": None,
        "min": 1e-9,
        "meta": {
            "long_name": "delta",
            "description": "Step of the recursion, T / 400 when empty",
        },
    },
    "quadrature": {
        "type": "string",
        "allowed": [r.value for r in QuadratureRule],
        "default": QuadratureRule.GAUSS_HERMITE.value,
        "meta": {
            "long_name": "quadrature",
            "description": "Expectation over the Brownian increment",
        },
    },
    "nodes": {
        "type": "integer",
        "default": 5,
        "min": 1,
        "meta": {
            "long_name": "quadrature-nodes",
            "description": "Gauss-Hermite nodes per Brownian dimension",
        },
    },
    "samples": {
        "type": "integer",
        "default": 1000,
        "min": 1,
        "meta": {
            "long_name": "quadrature-samples",
            "description": "Monte Carlo increments per node",
        },
    },
    "stop_rule": {
        "type": "string",
        "allowed": [r.value for r in StopRule],
        "default": StopRule.FIXED.value,
        "meta": {
            "long_name": "stop-rule",
            "description": "Intermediate time of the strong principle",
        },
    },
    "cap": {
        "type": "integer",
        "default": 5,
        "min": 1,
        "meta": {
            "long_name": "stop-cap",
            "description": "The boundary-hit time is capped at t + cap * delta",
        },
    },
    "substeps": {
        "type": "integer",
        "default": 1,
        "min": 1,
        "meta": {
            "long_name": "substeps",
            "description": "Simulation steps per delta in the principle checks",
        },
    },
}


@dataclass(slots=True, frozen=True)
class DPPConfig:
    delta: float
    quadrature: QuadratureRule = QuadratureRule.GAUSS_HERMITE
    nodes: int = 5
    """Gauss-Hermite nodes q per Brownian dimension."""
    samples: int = 1000
    """Monte Carlo increments N."""
    stop_rule: StopRule = StopRule.FIXED
    cap: int = 5
    substeps: int = 1

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.nodes < 1 or self.samples < 1:
            raise ValueError(f"need at least one quadrature node, got q = {self.nodes}, N = {self.samples}")
        if self.cap < 1 or self.substeps < 1:
            raise ValueError(f"cap and substeps must be positive, got {self.cap} and {self.substeps}")

    @classmethod
    def from_config(cls, config, horizon: float) -> DPPConfig:
        delta = config.get("delta") or horizon / 400
        return cls(delta=delta,
                   quadrature=QuadratureRule(config.get("quadrature", QuadratureRule.GAUSS_HERMITE)),
                   nodes=config.get("nodes", 5),
                   samples=config.get("samples", 1000),
                   stop_rule=StopRule(config.get("stop_rule", StopRule.FIXED)),
                   cap=config.get("cap", 5),
                   substeps=config.get("substeps", 1))

    def layers(self, horizon: float) -> int:
        """Number of recursion steps; delta has to divide the horizon."""
        count = int(np.rint(horizon / self.delta))
        if count < 1 or abs(count * self.delta - horizon) > 1e-9 * horizon:
            raise ValueError(f"delta = {self.delta} does not divide the horizon {horizon}")
        return count

    def increments(self, dimension: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """Weights (Q,) and standard normal points (Q, d) of the expectation over one increment.

        Tensor Gauss-Hermite up to dimension 2, Monte Carlo beyond.
        """
        rule = self.quadrature
        if rule == QuadratureRule.GAUSS_HERMITE and dimension > MAX_TENSOR_DIMENSION:
            log.warning("Gauss-Hermite tensor rule in dimension %d, falling back to %d Monte Carlo samples", dimension,
                        self.samples)
            rule = QuadratureRule.MC
        match rule:
            case QuadratureRule.GAUSS_HERMITE:
                roots, weights = hermgauss(self.nodes)
                roots, weights = roots * np.sqrt(2.0), weights / np.sqrt(np.pi)
                points = np.array(list(itertools.product(roots, repeat=dimension)))
                mass = np.array([np.prod(w) for w in itertools.product(weights, repeat=dimension)])
                return mass, points.reshape(-1, dimension)
            case QuadratureRule.MC:
                points = normals(generator(seed, 0, Purpose.QUADRATURE), (self.samples, dimension))
                return np.full(self.samples, 1.0 / self.samples), points
        raise ValueError(f"no such quadrature rule '{rule}'")
