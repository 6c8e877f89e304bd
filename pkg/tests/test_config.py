# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

from refgame.cli.sections import SECTIONS
from refgame.config import (OUT_DIR_ENV, CliConfigLoader, Config, ExperimentConfigLoader, YamlFileConfigLoader,
                            get_assembled_schema)
from refgame.dynamics import factory as problem_factory
from refgame.errors import ConfigError
from refgame.log import get_child_logger

log = get_child_logger("test-config")

SCHEMA = get_assembled_schema(problem_factory.CONFIG_SCHEMA, SECTIONS)


class TestExperimentConfig(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def _file(self, text: str) -> Path:
        path = self.tmp / "experiment.json"
        path.write_text(text, encoding="utf-8")
        return path

    def _load(self, text: str, cli: dict | None = None) -> Config:
        return ExperimentConfigLoader(SCHEMA, CliConfigLoader(SCHEMA, cli),
                                      YamlFileConfigLoader(SCHEMA, self._file(text))).load()

    def test_defaults_filled(self):
        config = self._load('{"fixture": "eigenfixture", "output": "out"}')
        self.assertEqual(config.seed, 0)
        self.assertEqual(config.threads, 1)
        self.assertEqual(config.output, Path("out"))
        self.assertEqual(config.pde.h, 0.01)
        self.assertEqual(config.timechange.t, 1.5)
        self.assertEqual(config.gbsde.regression.basis, "affine")

    def test_unknown_key(self):
        with self.assertRaises(ConfigError) as context:
            self._load('{"fixture": "trivial", "pde": {"mesh": 0.1}}')
        self.assertTrue(any("pde.mesh" in reason for reason in context.exception.reasons))

    def test_wrong_type(self):
        with self.assertRaises(ConfigError):
            self._load('{"fixture": "trivial", "seed": -1}')

    def test_cli_over_file(self):
        config = self._load('{"fixture": "trivial", "seed": 3, "pde": {"h": 0.05, "cfl": 0.5}}',
                            cli={
                                "seed": "9",
                                "pde": {
                                    "h": 0.02,
                                    "cfl": None
                                }
                            })
        self.assertEqual(config.seed, 9)
        self.assertEqual(config.pde.h, 0.02)
        # options not given on the command line leave the file alone
        self.assertEqual(config.pde.cfl, 0.5)

    def test_fixture_or_problem(self):
        with self.assertRaises(ConfigError):
            self._load('{"seed": 1}')
        with self.assertRaises(ConfigError):
            self._load('{"fixture": "trivial", "problem": {"name": "x"}}')
        config = self._load('{"problem": {"name": "inline"}}')
        self.assertEqual(config.problem.name, "inline")

    def test_default_output_from_environment(self):
        with mock.patch.dict(os.environ, {OUT_DIR_ENV: str(self.tmp / "env-runs")}):
            config = self._load('{"fixture": "trivial"}')
        self.assertEqual(Path(config.output), self.tmp / "env-runs")

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            YamlFileConfigLoader(SCHEMA, self.tmp / "nope.json").load()

    def test_not_a_mapping(self):
        with self.assertRaises(ConfigError):
            YamlFileConfigLoader(SCHEMA, self._file("[1, 2]")).load()


class TestConfigModel(unittest.TestCase):

    def test_access(self):
        config = Config({"gbsde": {"regression": {"basis": "quadratic"}}})
        self.assertEqual(config["gbsde"]["regression"]["basis"], "quadratic")
        self.assertEqual(config[["gbsde", "regression", "basis"]], "quadratic")
        self.assertEqual(config.gbsde.regression.basis, "quadratic")

    def test_nested_assignment(self):
        config = Config()
        config[["pde", "probe", "t"]] = 0.5
        self.assertEqual(config.pde.probe.t, 0.5)
        with self.assertRaises(AttributeError):
            _ = config.nope


if __name__ == '__main__':
    unittest.main()
