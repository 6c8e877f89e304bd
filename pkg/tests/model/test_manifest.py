# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import tempfile
import unittest
from pathlib import Path

import numpy as np
import orjson
import pandas as pd

from refgame.errors import MissingManifest, RepositoryError
from refgame.log import get_child_logger
from refgame.model.manifest import RunManifest, config_hash
from refgame.model.value_grid import Kind
from refgame.repository.run_workdir import RunRepositoryWorkdir
from refgame.serializer.util import canonical_json, csv_serialize, json_serialize

log = get_child_logger("test-manifest")

CONFIG = {
    "fixture": "eigenfixture",
    "problem": None,
    "seed": 4,
    "threads": 1,
    "output": Path("runs/a"),
    "pde": {
        "h": 0.01,
        "kind": ["lower"]
    },
}


class TestConfigHash(unittest.TestCase):

    def test_threads_and_output_are_not_hashed(self):
        other = dict(CONFIG, threads=8, output=Path("elsewhere"))
        self.assertEqual(config_hash(CONFIG), config_hash(other))

    def test_seed_is_hashed(self):
        self.assertNotEqual(config_hash(CONFIG), config_hash(dict(CONFIG, seed=5)))

    def test_key_order_does_not_matter(self):
        reordered = dict(reversed(list(CONFIG.items())))
        self.assertEqual(config_hash(CONFIG), config_hash(reordered))
        self.assertEqual(len(config_hash(CONFIG)), 64)


class TestSerializer(unittest.TestCase):

    def test_canonical_json(self):
        self.assertEqual(canonical_json({"b": 1, "a": [Kind.LOWER, np.float64(0.5)]}), b'{"a":["lower",0.5],"b":1}')

    def test_json_serialize(self):
        text = json_serialize({"path": Path("x/y"), "values": np.arange(2), "pair": (1, 2)})
        self.assertEqual(orjson.loads(text), {"path": "x/y", "values": [0, 1], "pair": [1, 2]})
        self.assertTrue(text.endswith("\n"))

    def test_csv_keeps_every_digit(self):
        text = csv_serialize(pd.DataFrame({"t": [0.1], "value": [1.0 / 3.0]}))
        self.assertEqual(text, "t,value\n0.10000000000000001,0.33333333333333331\n")


class TestRunRepository(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.workdir = Path(self._tmp.name) / "run"
        self.repository = RunRepositoryWorkdir(self.workdir)

    def tearDown(self):
        self._tmp.cleanup()

    def test_manifest_round_trip(self):
        manifest = RunManifest(command="solve-pde",
                               fixture="eigenfixture",
                               config_hash=config_hash(CONFIG),
                               seed=4,
                               metrics={
                                   "h": 0.01,
                                   "error": 3e-3
                               },
                               passed=False)
        self.repository.store_manifest(manifest)
        loaded = self.repository.load_manifest()
        self.assertEqual(loaded, manifest)
        self.assertIn("numpy", loaded.versions)

    def test_missing_manifest(self):
        with self.assertRaises(MissingManifest):
            self.repository.load_manifest()

    def test_unreadable_manifest(self):
        self.workdir.mkdir(parents=True)
        (self.workdir / "manifest.json").write_text("{}", encoding="utf-8")
        with self.assertRaises(MissingManifest):
            self.repository.load_manifest()

    def test_tables(self):
        frame = pd.DataFrame({"epsilon": [0.2, 0.1], "estimate": [0.49, 0.5]})
        path = self.repository.store_table("limit", frame)
        self.assertEqual(path.name, "limit.csv")
        pd.testing.assert_frame_equal(self.repository.load_table("limit"), frame)
        with self.assertRaises(RepositoryError):
            self.repository.load_table("nope")

    def test_workdir_must_be_a_directory(self):
        self.workdir.parent.mkdir(parents=True, exist_ok=True)
        self.workdir.write_text("", encoding="utf-8")
        with self.assertRaises(RepositoryError):
            self.repository.store_record("gap", {"gap": 0.0})


if __name__ == '__main__':
    unittest.main()
