# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from refgame._compat import StrEnum


class Status(StrEnum):
    UNKNOWN = "unknown"
    OK = "ok"
    FAILED = "failed"

    def __str__(self) -> str:
        return self.name


class Reporter:
    """Interface for reporting the outcome of the checks of a run."""

    def add(self, check: str, status: Status, reasons: list[str] | None = None) -> None:
        """Add an entry to the report."""
        raise NotImplementedError()

    def close(self) -> None:
        """Closes the underlying resources."""
        raise NotImplementedError()

    def __del__(self):
        self.close()

    def verdict(self, check: str, passed: bool, reasons: list[str] | None = None) -> None:
        self.add(check, Status.OK if passed else Status.FAILED, None if passed else reasons)


class CountingReporter(Reporter):
    """Counts failures and forwards every entry to an inner reporter."""

    def __init__(self, inner: Reporter) -> None:
        self.inner = inner
        self.failures: list[str] = []

    def add(self, check: str, status: Status, reasons: list[str] | None = None) -> None:
        if status == Status.FAILED:
            self.failures.append(check)
        self.inner.add(check, status, reasons)

    def close(self) -> None:
        self.inner.close()
