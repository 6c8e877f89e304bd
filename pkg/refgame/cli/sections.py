# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Config sections of the subcommands.

The full experiment schema always carries every section, so one experiment
file can drive all subcommands; each subcommand only exposes its own section
on the command line.
"""

from __future__ import annotations

from copy import deepcopy

from refgame.dynamics.auditor import DEFAULT_Y_RANGE, DEFAULT_Z_RANGE
from refgame.game import cross_validate as cross_validate_
from refgame.game import quadrature
from refgame.game.dpp import CheckMode
from refgame.gbsde import CONFIG_SCHEMA as GBSDE_SCHEME_SCHEMA
from refgame.gbsde.regression import CONFIG_SCHEMA as REGRESSION_SCHEMA
from refgame.isaacs import scheme
from refgame.model.value_grid import Kind
from refgame.timechange import DEFAULT_EPSILONS, ASourceFactory


def _integer(default: int, long_name: str | None = None, description: str | None = None, min_: int = 1) -> dict:
    rule: dict = {"type": "integer", "min": min_, "default": default}
    if long_name:
        rule["meta"] = {"long_name": long_name, "description": description}
    return rule


def _float(default: float | None, long_name: str | None = None, description: str | None = None) -> dict:
    rule: dict = {"type": "float", "nullable": default is None, "default": default}
    if long_name:
        rule["meta"] = {"long_name": long_name, "description": description}
    return rule


def _flag(default: bool, long_name: str, description: str) -> dict:
    return {"type": "boolean", "default": default, "meta": {"long_name": long_name, "description": description}}


def _vector(default: list[float] | None, long_name: str | None = None, description: str | None = None) -> dict:
    rule: dict = {"type": "list", "nullable": default is None, "default": default, "schema": {"type": "float"}}
    if long_name:
        rule["meta"] = {"long_name": long_name, "description": description}
    return rule


def _nested(schema: dict) -> dict:
    return {"type": "dict", "default": {}, "schema": deepcopy(schema)}


_CONTROLS = _nested({
    "u": _integer(0, min_=0),
    "v": _integer(0, min_=0),
})

VALIDATE: dict = {
    "samples": _integer(1000, "samples", "Sample pairs of the domain and coefficient audits", 2),
    "gap_samples": _integer(200, "gap-samples", "Samples of the Isaacs gap"),
    "y_range": _float(DEFAULT_Y_RANGE),
    "z_range": _float(DEFAULT_Z_RANGE),
}

SIMULATE: dict = {
    "t0": _float(0.0, "t0", "Start time"),
    "x0": _vector(None, "x0", "Start state, the origin when empty"),
    "paths": _integer(1000, "paths", "Number of paths N"),
    "steps": _integer(100, "steps", "Number of time steps M"),
    "antithetic": _flag(False, "antithetic", "Pair every noise stream with its negation"),
    "dump_paths": _flag(False, "dump-paths", "Write every simulated path"),
    "controls": _CONTROLS,
    "moments": _nested({
        "enabled": _flag(False, "moments", "Run the coupled-path moment experiment"),
        "lambdas": _vector([1.0]),
        "separations": _vector([0.1, 0.05, 0.025, 0.0125]),
    }),
}

GBSDE: dict = {
    "t": _float(0.0, "t", "Start time"),
    "x0": _vector(None, "x0", "Start state, the origin when empty"),
    "paths": _integer(10_000, "paths", "Number of paths N"),
    "steps": _integer(100, "steps", "Number of time steps M"),
    "controls": _CONTROLS,
    "regression": _nested(REGRESSION_SCHEMA),
    "scheme": _nested(GBSDE_SCHEME_SCHEMA),
    "flow_s": _float(0.5, "flow-s", "Intermediate time of the flow check, skipped when empty"),
    "comparison_shift": _float(0.1, "comparison-shift", "Shift of terminal and generator of the ordered pair"),
    "growth_radii": _vector([0.0, 0.5, 1.0]),
}

TIMECHANGE: dict = {
    "t": _float(1.5, "t", "Time of the small-horizon limit"),
    "y": _float(0.5, "y", "Initial value y"),
    "z": _vector(None, "z", "Initial integrand z, zero when empty"),
    "x0": _vector(None),
    "a_source": _nested({
        "type": {
            "type": "string",
            "allowed": ASourceFactory.list_available_sources(),
            "default": "piecewise",
            "meta": {
                "long_name": "a-source",
                "description": f"Increasing process A (available: {', '.join(ASourceFactory.list_available_sources())})",
            },
        },
        "slope": _float(1.0),
        "knee": _float(1.0),
    }),
    "epsilons": _vector(list(DEFAULT_EPSILONS), "epsilons", "Decreasing horizons eps, separated by ';'"),
    "paths": _integer(10_000, "paths", "Number of paths N"),
    "steps": _integer(200, "steps", "Number of time steps per horizon"),
    "clock_nodes": _integer(2001, min_=2),
    "regression": _nested(REGRESSION_SCHEMA),
    "scheme": _nested(GBSDE_SCHEME_SCHEMA),
    "equivalence": _nested({
        "enabled": _flag(True, "equivalence", "Solve in both clocks and compare"),
        "t": _float(0.0),
        "horizon": _float(2.0),
        "terminal": _float(1.0),
        "paths": _integer(10_000),
        "steps": _integer(2000),
    }),
}

PDE: dict = {
    **deepcopy(scheme.CONFIG_SCHEMA),
    "probe": _nested({
        "t": _float(0.9, "probe-t", "Time of the probe point"),
        "x": _vector(None, "probe-x", "Position of the probe point, the origin when empty"),
    }),
    "report_times": _integer(11, "report-times", "Equidistant times written to the value table", 2),
    "residual": _flag(False, "residual", "Compute the viscosity residuals"),
    "monotonicity_probes": _integer(10, "monotonicity-probes", "Perturbed nodes of the monotonicity probe", 0),
    "comparison_shift": _float(0.1, "comparison-shift", "Terminal shift of the ordered pair, skipped when empty"),
    "tolerance": _float(None, "tolerance", "Largest admissible probe error against the closed form"),
}

DPP: dict = {
    **deepcopy(quadrature.CONFIG_SCHEMA),
    "h": _float(0.02, "mesh-width", "Width of the tensor mesh"),
    "kind": deepcopy(scheme.CONFIG_SCHEMA["kind"]) | {"default": [Kind.LOWER.value]},
    "modes": {
        "type": "list",
        "schema": {
            "type": "string",
            "allowed": [m.value for m in CheckMode]
        },
        "default": [m.value for m in CheckMode],
        "meta": {
            "long_name": "modes",
            "description": "Principle checks to run",
        },
    },
    "paths": _integer(10_000, "paths", "Paths per probe and control pair", 2),
    "probes": _integer(8, "probes", "Probe points of the principle checks", 0),
    "regularity": _flag(True, "regularity", "Fit the continuity moduli"),
    "report_layers": _integer(11, min_=2),
    "regression": _nested(REGRESSION_SCHEMA),
    "scheme": _nested(GBSDE_SCHEME_SCHEMA),
}

CROSS_VALIDATE: dict = {
    **deepcopy(cross_validate_.CONFIG_SCHEMA),
    "tolerance": _float(0.03, "tolerance", "Largest admissible pairwise difference"),
    "regression": _nested(REGRESSION_SCHEMA),
    "scheme": _nested(GBSDE_SCHEME_SCHEMA),
}

SECTIONS: dict[str, dict] = {
    "validate": VALIDATE,
    "simulate": SIMULATE,
    "gbsde": GBSDE,
    "timechange": TIMECHANGE,
    "pde": PDE,
    "dpp": DPP,
    "cross_validate": CROSS_VALIDATE,
}
