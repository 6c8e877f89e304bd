# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from collections.abc import Mapping

from refgame.errors import ConfigError
from refgame.geometry import DEFAULT_BOUNDARY_TOL, Domain
from refgame.geometry.ball import BallDomain, IntervalDomain
from refgame.geometry.level_set import QuadricDomain

_domain_classes: dict[str, type[Domain]] = {
    IntervalDomain.NAME: IntervalDomain,
    BallDomain.NAME: BallDomain,
    QuadricDomain.NAME: QuadricDomain,
}

CONFIG_SCHEMA: dict = {
    "type": "dict",
    "default": {},
    "schema": {
        "type": {
            "type": "string",
            "coerce": "strip_str",
            "default": IntervalDomain.NAME,
            "allowed": list(_domain_classes),
            "meta": {
                "long_name": "domain",
                "description": f"Constraint domain (available: {', '.join(_domain_classes)})"
            },
        },
        "dimension": {
            "type": "integer",
            "min": 1,
            "max": 3,
            "default": 1,
        },
        "radius": {
            "type": "float",
            "min": 0.0,
            "default": 1.0,
        },
        "coefficients": {
            "type": "list",
            "schema": {
                "type": "float"
            },
            "nullable": True,
            "default": None,
        },
        "level": {
            "type": "float",
            "default": 1.0,
        },
        "c0": {
            "type": "float",
            "min": 0.0,
            "default": 1.0,
        },
        "boundary_tol": {
            "type": "float",
            "min": 0.0,
            "default": DEFAULT_BOUNDARY_TOL,
        },
    },
}


class DomainFactory:

    @classmethod
    def list_available_domains(cls) -> list[str]:
        return list(_domain_classes)

    @classmethod
    def is_domain_available(cls, name: str) -> bool:
        return name in _domain_classes

    @classmethod
    def from_config(cls, config: Mapping) -> Domain:
        name = config.get("type", IntervalDomain.NAME)
        c0 = config.get("c0", 1.0)
        tol = config.get("boundary_tol", DEFAULT_BOUNDARY_TOL)
        match name:
            case IntervalDomain.NAME:
                return IntervalDomain(c0=c0, boundary_tol=tol)
            case BallDomain.NAME:
                return BallDomain(config.get("dimension", 1), config.get("radius", 1.0), c0=c0, boundary_tol=tol)
            case QuadricDomain.NAME:
                coefficients = config.get("coefficients")
                if not coefficients:
                    raise ConfigError("the quadric domain needs 'coefficients'", ["missing option 'domain.coefficients'"])
                return QuadricDomain(coefficients, config.get("level", 1.0), c0=c0, boundary_tol=tol)
            case _:
                raise ConfigError(f"no such domain '{name}', available are: {', '.join(_domain_classes)}",
                                  [f"invalid option 'domain.type': {name}"])
