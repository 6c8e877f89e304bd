# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from collections.abc import Mapping
from typing import Any

from refgame.config import validate
from refgame.dynamics import CoefficientSet, ControlSet, Player, ProblemSpec
from refgame.dynamics.families import FAMILIES, Family
from refgame.errors import ConfigError
from refgame.geometry import factory as domain_factory
from refgame.geometry.factory import DomainFactory
from refgame.log import get_child_logger

log = get_child_logger("dynamics")

_DEFAULT_FAMILIES = {
    "drift": "zero",
    "diffusion": "constant",
    "generator": "affine",
    "boundary_cost": "affine",
    "terminal": "constant",
}


def _coefficient_schema(role: str) -> dict:
    return {
        "type": "dict",
        "default": {},
        "schema": {
            "family": {
                "type": "string",
                "coerce": "strip_str",
                "default": _DEFAULT_FAMILIES[role],
                "allowed": list(FAMILIES[role]),
                "meta": {
                    "long_name": role,
                    "description": f"Family of the {role} (available: {', '.join(FAMILIES[role])})"
                },
            },
            # checked against the schema of the chosen family
            "params": {
                "type": "dict",
                "default": {},
                "allow_unknown": True,
            },
        },
    }


def _controls_schema() -> dict:
    return {
        "type": "dict",
        "default": {},
        "schema": {
            "dimension": {
                "type": "integer",
                "min": 0,
                "default": 1
            },
            "count": {
                "type": "integer",
                "min": 1,
                "default": 1
            },
            "low": {
                "type": "float",
                "default": -1.0
            },
            "high": {
                "type": "float",
                "default": 1.0
            },
            "points": {
                "type": "list",
                "nullable": True,
                "default": None,
                "schema": {
                    "type": "list",
                    "schema": {
                        "type": "float"
                    }
                },
            },
        },
    }


CONFIG_SCHEMA: dict = {
    "domain": domain_factory.CONFIG_SCHEMA,
    **{role: _coefficient_schema(role) for role in FAMILIES},
    "brownian_dimension": {
        "type": "integer",
        "min": 1,
        "nullable": True,
        "default": None,
    },
    "controls_u": _controls_schema(),
    "controls_v": _controls_schema(),
    "horizon": {
        "type": "float",
        "min": 0.0,
        "default": 1.0,
        "meta": {
            "description": "Time horizon T"
        },
    },
    "constants": {
        "type": "dict",
        "default": {},
        "schema": {
            name: {
                "type": "float",
                "default": default
            } for name, default in (("K", 1.0), ("lambda1", 0.0), ("lambda2", 0.0), ("bound", 1.0))
        },
    },
    "name": {
        "type": "string",
        "default": "inline",
    },
}


class FamilyFactory:

    @classmethod
    def list_available_families(cls, role: str) -> list[str]:
        return list(FAMILIES[role])

    @classmethod
    def is_family_available(cls, role: str, name: str) -> bool:
        return name in FAMILIES.get(role, {})

    @classmethod
    def create(cls, role: str, name: str, params: Mapping[str, Any], state_dim: int, brownian_dim: int) -> Family:
        if not cls.is_family_available(role, name):
            raise ConfigError(f"no such {role} family '{name}', available are: {', '.join(FAMILIES.get(role, {}))}",
                              [f"invalid option '{role}.family': {name}"])
        family_class = FAMILIES[role][name]
        validated, reasons = validate(dict(params), family_class.PARAMS_SCHEMA)
        if reasons:
            raise ConfigError(f"Invalid parameters of the {role} family '{name}':\n    " + "\n    ".join(reasons),
                              [f"{role}.params: {reason}" for reason in reasons])
        family = family_class(**validated)
        try:
            family.configure(state_dim, brownian_dim)
        except ValueError as err:
            raise ConfigError(f"Invalid parameters of the {role} family '{name}': {err}",
                              [f"invalid option '{role}.params': {err}"]) from err
        return family


class ProblemFactory:

    @classmethod
    def controls_from_config(cls, label: Player, config: Mapping) -> ControlSet:
        points = config.get("points")
        if points:
            return ControlSet(points, label)
        if config.get("dimension", 1) == 0:
            return ControlSet.singleton(label, 0)
        return ControlSet.uniform(label, config.get("dimension", 1), config.get("count", 1), config.get("low", -1.0),
                                  config.get("high", 1.0))

    @classmethod
    def from_config(cls, config: Mapping) -> ProblemSpec:
        domain = DomainFactory.from_config(config.get("domain", {}))
        n = domain.dimension
        d = config.get("brownian_dimension") or n
        families = {}
        for role in FAMILIES:
            section = config.get(role, {})
            families[role] = FamilyFactory.create(role, section.get("family", _DEFAULT_FAMILIES[role]),
                                                  section.get("params", {}), n, d)
        constants = config.get("constants", {})
        coeffs = CoefficientSet(
            drift=families["drift"],
            diffusion=families["diffusion"],
            generator=families["generator"],
            boundary_cost=families["boundary_cost"],
            terminal=families["terminal"],
            brownian_dimension=d,
            K=constants.get("K", 1.0),
            lambda1=constants.get("lambda1", 0.0),
            lambda2=constants.get("lambda2", 0.0),
            bound=constants.get("bound", 1.0),
        )
        try:
            spec = ProblemSpec(domain, coeffs, cls.controls_from_config(Player.U, config.get("controls_u", {})),
                               cls.controls_from_config(Player.V, config.get("controls_v", {})),
                               config.get("horizon", 1.0), config.get("name", "inline"))
        except ValueError as err:
            raise ConfigError(f"Inconsistent problem: {err}", [f"invalid option 'problem': {err}"]) from err
        log.debug("built problem %s on %s", spec.name, domain)
        return spec
