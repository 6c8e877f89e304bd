# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from pathlib import Path
from typing import TextIO

from refgame.reporter import Reporter, Status


class FileReporter(Reporter):
    """Writes one line per check, `STATUS  : check [: reasons]`, to `checks.txt` of a run."""

    _file: TextIO | None = None

    def __init__(self, path: Path) -> None:
        if path.exists() and not path.is_file():
            raise OSError(f"'{path}' is not a file")
        self._file = path.open("w", encoding="utf-8")

    def add(self, check: str, status: Status, reasons: list[str] | None = None) -> None:
        if not isinstance(status, Status):
            raise ValueError(f"unknown status: {status}")
        fields = [f"{status!s:<8}", check]
        if status is Status.FAILED:
            fields.append(", ".join(reasons or []))
        if self._file:
            self._file.write(": ".join(fields) + "\n")

    def close(self) -> None:
        if self._file:
            self._file.close()
            self._file = None
