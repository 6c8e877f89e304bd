# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from pathlib import Path

import orjson
import pandas as pd

from refgame.errors import MissingManifest, RepositoryError
from refgame.log import get_child_logger
from refgame.model.manifest import RunManifest
from refgame.repository import RunRepository
from refgame.serializer.util import csv_serialize, json_serialize

log = get_child_logger("repo_run")

MANIFEST_FILE = "manifest.json"
CHECKS_FILE = "checks.txt"


class RunRepositoryWorkdir(RunRepository):
    """Stores the artifacts of a run in one directory of the local file-system."""

    def __init__(self, workdir: Path) -> None:
        self.workdir = Path(workdir)

    def _prepare(self) -> None:
        if self.workdir.exists() and not self.workdir.is_dir():
            raise RepositoryError(f"'{self.workdir}' is not a directory")
        self.workdir.mkdir(parents=True, exist_ok=True)

    def _store_text_file(self, file_name: str, content: str) -> Path:
        if not isinstance(content, str):
            raise TypeError(f"Text-file content must be of type `str`, but is: {type(content)}")
        self._prepare()
        path = self.workdir / file_name
        try:
            path.write_text(content, encoding="utf-8")
        except OSError as err:
            raise RepositoryError(f"failed to write '{path}': {err}") from err
        log.debug("stored %s", path)
        return path

    @property
    def checks_path(self) -> Path:
        self._prepare()
        return self.workdir / CHECKS_FILE

    def store_table(self, name: str, frame: pd.DataFrame) -> Path:
        return self._store_text_file(f"{name}.csv", csv_serialize(frame))

    def store_record(self, name: str, record: dict | list) -> Path:
        return self._store_text_file(f"{name}.json", json_serialize(record))

    def store_manifest(self, manifest: RunManifest) -> Path:
        return self._store_text_file(MANIFEST_FILE, json_serialize(manifest.as_dict()))

    def load_manifest(self) -> RunManifest:
        path = self.workdir / MANIFEST_FILE
        if not path.is_file():
            raise MissingManifest(f"no run manifest in '{self.workdir}'")
        try:
            return RunManifest.from_dict(orjson.loads(path.read_bytes()))  # pylint: disable=no-member
        except (orjson.JSONDecodeError, KeyError, TypeError, ValueError) as err:  # pylint: disable=no-member
            raise MissingManifest(f"unreadable run manifest '{path}': {err}") from err

    def load_table(self, name: str) -> pd.DataFrame:
        path = self.workdir / f"{name}.csv"
        if not path.is_file():
            raise RepositoryError(f"no table '{name}' in '{self.workdir}'")
        return pd.read_csv(path)
