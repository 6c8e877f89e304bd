# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from pathlib import Path

import pandas as pd

from refgame.model.manifest import RunManifest


class RunRepository:
    """Interface for storing the artifacts of a run."""

    def store_table(self, name: str, frame: pd.DataFrame) -> Path:
        raise NotImplementedError()

    def store_record(self, name: str, record: dict | list) -> Path:
        raise NotImplementedError()

    def store_manifest(self, manifest: RunManifest) -> Path:
        raise NotImplementedError()

    def load_manifest(self) -> RunManifest:
        raise NotImplementedError()
