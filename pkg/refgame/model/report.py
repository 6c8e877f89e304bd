# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


def _plain(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


@dataclass(slots=True, frozen=True)
class Violation:
    """A single failed sample check."""

    kind: str
    """Check family, e.g. `grad_norm` or `lipschitz_x:b`."""
    message: str
    witness: dict[str, Any] = field(default_factory=dict)
    """Sample point(s) at which the check failed."""
    measured: float | None = None
    claimed: float | None = None

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "message": self.message,
            "witness": _plain(self.witness),
            "measured": self.measured,
            "claimed": self.claimed,
        }


@dataclass(slots=True)
class ValidationReport:
    """Outcome of a sampling audit.

    An empty violation list only means that no violation was found at the
    drawn samples; it never certifies the audited property.
    """

    subject: str
    sample_count: int
    seed: int
    violations: list[Violation] = field(default_factory=list)
    measured: dict[str, float] = field(default_factory=dict)
    """Largest witnessed value per checked constant."""
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, violation: Violation) -> None:
        self.violations.append(violation)

    def merge(self, other: ValidationReport) -> ValidationReport:
        self.violations.extend(other.violations)
        self.measured.update(other.measured)
        self.notes.extend(other.notes)
        return self

    def header(self) -> dict:
        return {
            "subject": self.subject,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "passed": self.passed,
            "certified": False,
            "measured": dict(self.measured),
            "notes": list(self.notes),
        }

    def records(self) -> list[dict]:
        return [v.as_dict() for v in self.violations]
