# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import hashlib
import platform
from dataclasses import asdict, dataclass, field
from importlib import metadata
from typing import Any

from refgame import __version__
from refgame.config import plain
from refgame.serializer.util import canonical_json

# keys that do not change results and vary between otherwise identical runs
UNHASHED_KEYS = ("threads", "output")
VERSIONED_PACKAGES = ("numpy", "scipy", "pandas")


def config_hash(config) -> str:
    """sha256 of the canonical JSON of a validated config."""
    document = {k: v for k, v in plain(config).items() if k not in UNHASHED_KEYS}
    return hashlib.sha256(canonical_json(document)).hexdigest()


def package_versions() -> dict[str, str]:
    versions = {"refgame": __version__, "python": platform.python_version()}
    for package in VERSIONED_PACKAGES:
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = "unknown"
    return versions


@dataclass(slots=True)
class RunManifest:
    """Provenance and headline metrics of one run."""

    command: str
    fixture: str
    config_hash: str
    seed: int
    versions: dict[str, str] = field(default_factory=package_versions)
    metrics: dict[str, Any] = field(default_factory=dict)
    """Scalar results, e.g. {'h': 0.01, 'error': 3e-3}, joined by `report`."""
    passed: bool = True

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> RunManifest:
        return cls(command=data["command"],
                   fixture=data["fixture"],
                   config_hash=data["config_hash"],
                   seed=int(data["seed"]),
                   versions=dict(data.get("versions", {})),
                   metrics=dict(data.get("metrics", {})),
                   passed=bool(data.get("passed", True)))
