# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Agreement of the PDE solver, the dynamic programming recursion and Monte Carlo under the PDE's feedback."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import pandas as pd

from refgame.dynamics import Player
from refgame.dynamics.fixtures import Fixture
from refgame.game.dpp import dpp_value
from refgame.game.feedback import FeedbackTables
from refgame.game.quadrature import DPPConfig
from refgame.gbsde import SchemeOptions
from refgame.gbsde.regression import RegressionSpec
from refgame.gbsde.semigroup import semigroup_G
from refgame.isaacs.scheme import solve
from refgame.log import get_child_logger
from refgame.model.value_grid import Kind

log = get_child_logger("cross-validate")

DEFAULT_PROBES = ((0.5, (0.0,)), (0.9, (0.5,)))

CONFIG_SCHEMA = {
    "resolutions": {
        "type": "list",
        "minlength": 1,
        "default": [{}],
        "schema": {
            "type": "dict",
            "schema": {
                "h": {
                    "type": "float",
                    "default": 0.01,
                    "min": 1e-6
                },
                "time_steps": {
                    "type": "integer",
                    "nullable": True,
                    "default": None,
                    "min": 1
                },
                "layers": {
                    "type": "integer",
                    "default": 400,
                    "min": 1
                },
                "paths": {
                    "type": "integer",
                    "default": 10_000,
                    "min": 2
                },
                "steps": {
                    "type": "integer",
                    "default": 400,
                    "min": 1
                },
            },
        },
        "meta": {
            "description": "Mesh width, PDE time steps, recursion layers, Monte Carlo paths and steps per run",
        },
    },
    "probes": {
        "type": "list",
        "nullable": True,
        "default": None,
        "schema": {
            "type": "dict",
            "schema": {
                "t": {
                    "type": "float",
                    "required": True
                },
                "x": {
                    "type": "list",
                    "schema": {
                        "type": "float"
                    },
                    "required": True
                },
            },
        },
        "meta": {
            "description": "(t, x) points to compare at",
        },
    },
    "kinds": {
        "type": "list",
        "minlength": 1,
        "schema": {
            "type": "string",
            "allowed": [k.value for k in Kind]
        },
        "default": [Kind.LOWER.value],
        "meta": {
            "long_name": "kinds",
            "description": "Value functions to cross-validate",
        },
    },
}


@dataclass(slots=True, frozen=True)
class Resolution:
    h: float = 0.01
    time_steps: int | None = None
    """PDE time steps, the smallest stable count when None."""
    layers: int = 400
    """Steps M of the recursion."""
    paths: int = 10_000
    steps: int = 400
    """Monte Carlo time steps on [t, T]."""

    @classmethod
    def from_config(cls, config) -> Resolution:
        return cls(**dict(config))


@dataclass(slots=True, frozen=True)
class CrossValidation:
    table: pd.DataFrame
    """Per (kind, resolution, probe): isaacs, dpp, mc, mc_stderr, pairwise differences, exact."""

    def max_difference(self) -> float:
        return float(self.table[["d_isaacs_dpp", "d_isaacs_mc", "d_dpp_mc"]].to_numpy().max())

    def agrees(self, tol: float = 0.03) -> bool:
        return self.max_difference() <= tol


def cross_validate(fixture: Fixture,
                   resolutions: Sequence[Resolution] = (Resolution(),),
                   probes: Sequence[tuple[float, Sequence[float]]] = DEFAULT_PROBES,
                   kinds: Sequence[Kind] = (Kind.LOWER,),
                   seed: int = 0,
                   reg: RegressionSpec = RegressionSpec(),
                   options: SchemeOptions = SchemeOptions(),
                   threads: int = 1) -> CrossValidation:
    spec = fixture.build()
    records = []
    for kind in map(Kind, kinds):
        for resolution in resolutions:
            pde = solve(spec, kind, resolution.h, resolution.time_steps)
            recursion = dpp_value(spec, kind, pde.mesh, DPPConfig(delta=spec.T / resolution.layers), seed, threads)
            tables = FeedbackTables(spec, pde)
            u_policy, v_policy = tables.policy(Player.U), tables.policy(Player.V)
            for t, x in probes:
                x = np.asarray(x, dtype=float)
                isaacs = float(pde.value_at(t, x)[0])
                dpp = float(recursion.value_at(t, x)[0])
                mc = semigroup_G(spec, t, x, u_policy, v_policy, spec.T, spec.coeffs.Phi, resolution.paths,
                                 resolution.steps, seed, reg, options, threads)
                record = {"kind": kind.value, "h": pde.mesh.h, "pde_dt": pde.dt, "delta": recursion.dt, "t": t}
                record.update({f"x{i}": float(c) for i, c in enumerate(x)})
                exact = fixture.exact(kind, t, x)
                record.update({
                    "isaacs": isaacs,
                    "dpp": dpp,
                    "mc": mc.value,
                    "mc_stderr": mc.stderr,
                    "d_isaacs_dpp": abs(isaacs - dpp),
                    "d_isaacs_mc": abs(isaacs - mc.value),
                    "d_dpp_mc": abs(dpp - mc.value),
                    "exact": float(exact[0]) if exact is not None else np.nan,
                })
                records.append(record)
                log.info("%s at t=%g x=%s: isaacs %.5f dpp %.5f mc %.5f (+- %.1e)", kind, t, x.tolist(), isaacs, dpp,
                         mc.value, mc.stderr)
    return CrossValidation(pd.DataFrame.from_records(records))
