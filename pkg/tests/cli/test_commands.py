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
import yaml
from cleo import CommandTester

import refgame
from refgame.cli import Application
from refgame.cli.command import EXIT_CHECK_FAILURE, EXIT_ERROR
from refgame.cli.command.report import COLUMNS as CONVERGENCE_COLUMNS
from refgame.cli.command.report import convergence_table
from refgame.cli.command.validate import VIOLATION_COLUMNS
from refgame.game.regularity import COLUMNS as REGULARITY_COLUMNS
from refgame.log import get_child_logger
from refgame.model.manifest import RunManifest
from refgame.repository.run_workdir import RunRepositoryWorkdir
from refgame.timechange.representation import COLUMNS as REPRESENTATION_COLUMNS

log = get_child_logger("test-cli")

EIGEN_PDE = {
    "fixture": "eigenfixture",
    "pde": {
        "h": 0.05,
        "kind": ["lower", "upper"],
        "report_times": 3,
        "monotonicity_probes": 4,
        "tolerance": 0.05,
    },
}


def _manifest(h: float, error: float, command: str = "solve-pde") -> RunManifest:
    return RunManifest(command=command,
                       fixture="eigenfixture",
                       config_hash="0" * 64,
                       seed=0,
                       metrics={
                           "h": h,
                           "dt": h * h,
                           "error": error
                       })


class CommandTestCase(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.application = Application()

    def tearDown(self):
        self._tmp.cleanup()

    def execute(self, name: str, config: dict, out: Path, extra: str = "") -> None:
        path = self.tmp / f"{name}.json"
        path.write_bytes(orjson.dumps(config))  # pylint: disable=no-member
        tester = CommandTester(self.application.find(name))
        tester.execute(f"--config {path} --out {out} {extra}".strip())


class TestValidate(CommandTestCase):

    def test_unit_disk_passes(self):
        out = self.tmp / "validate"
        self.execute("validate", {"fixture": "unit-disk", "validate": {"samples": 200, "gap_samples": 20}}, out)
        self.assertTrue((out / "violations.csv").is_file())
        self.assertTrue((out / "validation.json").is_file())
        manifest = RunRepositoryWorkdir(out).load_manifest()
        self.assertEqual(manifest.command, "validate")
        self.assertTrue(manifest.passed)
        self.assertEqual(manifest.metrics["violations"], 0)

    def test_failed_audit_exits_with_check_failure(self):
        out = self.tmp / "quadratic"
        problem = {"name": "quadratic-g", "generator": {"family": "quadratic", "params": {"q": 1.0}}}
        with self.assertRaises(SystemExit) as context:
            self.execute("validate", {"problem": problem, "validate": {"samples": 200, "gap_samples": 5}}, out)
        self.assertEqual(context.exception.code, EXIT_CHECK_FAILURE)
        self.assertFalse(RunRepositoryWorkdir(out).load_manifest().passed)

    def test_unknown_key(self):
        out = self.tmp / "never"
        with self.assertRaises(SystemExit) as context:
            self.execute("validate", {"fixture": "unit-disk", "validate": {"sample": 10}}, out)
        self.assertEqual(context.exception.code, EXIT_ERROR)
        self.assertFalse(out.exists())

    def test_unknown_fixture(self):
        with self.assertRaises(SystemExit) as context:
            self.execute("validate", {"fixture": "nope"}, self.tmp / "never")
        self.assertEqual(context.exception.code, EXIT_ERROR)


class TestSolvePDE(CommandTestCase):

    def test_eigenfixture(self):
        out = self.tmp / "pde"
        self.execute("solve-pde", EIGEN_PDE, out)
        probe = pd.read_csv(out / "probe.csv")
        self.assertEqual(list(probe["kind"]), ["lower", "upper"])
        np.testing.assert_allclose(probe["value"], np.exp(-0.1 * np.pi**2), atol=0.01)
        values = pd.read_csv(out / "value_lower.csv")
        self.assertEqual(len(values), 3 * 41)
        manifest = RunRepositoryWorkdir(out).load_manifest()
        self.assertAlmostEqual(manifest.metrics["h"], 0.05)
        self.assertLess(manifest.metrics["error"], 0.05)
        checks = (out / "checks.txt").read_text(encoding="utf-8")
        self.assertIn("lower-below-upper", checks)

    def test_cli_option_overrides_file(self):
        out = self.tmp / "pde-seed"
        self.execute("solve-pde", EIGEN_PDE, out, "--seed 7 --mesh-width 0.1")
        manifest = RunRepositoryWorkdir(out).load_manifest()
        self.assertEqual(manifest.seed, 7)
        self.assertAlmostEqual(manifest.metrics["h"], 0.1)


class TestReport(CommandTestCase):

    def _run_dir(self, name: str, manifest: RunManifest) -> Path:
        run_dir = self.tmp / name
        RunRepositoryWorkdir(run_dir).store_manifest(manifest)
        return run_dir

    def test_single_run_has_no_slope(self):
        table = convergence_table([self._run_dir("a", _manifest(0.02, 1e-3))])
        self.assertEqual(len(table), 1)
        self.assertTrue(np.isnan(table["slope_h"].iloc[0]))

    def test_slopes(self):
        runs = [self._run_dir("coarse", _manifest(0.04, 4e-3)), self._run_dir("fine", _manifest(0.02, 1e-3))]
        table = convergence_table(runs)
        self.assertEqual(list(table["h"]), [0.02, 0.04])
        np.testing.assert_allclose(table["slope_h"], 2.0)
        np.testing.assert_allclose(table["slope_dt"], 1.0)

    def test_groups_by_command(self):
        runs = [self._run_dir("pde", _manifest(0.04, 4e-3)), self._run_dir("dpp", _manifest(0.02, 1e-3, "dpp"))]
        self.assertTrue(convergence_table(runs)["slope_h"].isna().all())

    def test_command_writes_table(self):
        runs = [self._run_dir("coarse", _manifest(0.04, 4e-3)), self._run_dir("fine", _manifest(0.02, 1e-3))]
        out = self.tmp / "report"
        CommandTester(self.application.find("report")).execute(f"--out {out} {runs[0]} {runs[1]}")
        self.assertEqual(len(pd.read_csv(out / "convergence.csv")), 2)

    def test_missing_manifest(self):
        with self.assertRaises(SystemExit) as context:
            CommandTester(self.application.find("report")).execute(f"--out {self.tmp / 'r'} {self.tmp / 'empty'}")
        self.assertEqual(context.exception.code, EXIT_ERROR)


class ExperimentTestCase(CommandTestCase):

    def run_experiment(self, name: str, config: dict, out: Path, extra: str = "") -> int:
        """Exit code of the command, 0 when it returns."""
        try:
            self.execute(name, config, out, extra)
        except SystemExit as exit_:
            return exit_.code
        return 0

    def assertRecorded(self, out: Path, code: int, command: str) -> RunManifest:
        """A manifest exists and its verdict matches the exit code."""
        self.assertIn(code, (0, EXIT_CHECK_FAILURE))
        manifest = RunRepositoryWorkdir(out).load_manifest()
        self.assertEqual(manifest.command, command)
        self.assertEqual(manifest.passed, code == 0)
        self.assertTrue((out / "checks.txt").is_file())
        return manifest


class TestSimulate(ExperimentTestCase):

    CONFIG = {
        "fixture": "eigenfixture",
        "simulate": {
            "paths": 50,
            "steps": 20,
            "moments": {
                "enabled": True,
                "separations": [0.1, 0.05]
            }
        },
    }

    def test_ensemble_and_moments(self):
        out = self.tmp / "simulate"
        code = self.run_experiment("simulate", self.CONFIG, out)
        self.assertEqual(code, 0)
        manifest = self.assertRecorded(out, code, "simulate")
        self.assertEqual(manifest.fixture, "eigenfixture")
        self.assertEqual(manifest.metrics["paths"], 50)
        ensemble = pd.read_csv(out / "ensemble.csv")
        self.assertEqual(len(ensemble), 21)
        self.assertTrue((ensemble["max_eta"].diff().dropna() >= 0.0).all())
        differences = pd.read_csv(out / "moments_differences.csv")
        # the coupled identical pair plus a space and a time pair per separation
        self.assertEqual(len(differences), 5)
        self.assertEqual(differences["sup_x4"].iloc[0], 0.0)
        self.assertTrue((out / "moments_exponential.csv").is_file())

    def test_same_seed_same_artifacts(self):
        first, second = self.tmp / "first", self.tmp / "second"
        self.assertEqual(self.run_experiment("simulate", self.CONFIG, first, "--seed 11"), 0)
        self.assertEqual(self.run_experiment("simulate", self.CONFIG, second, "--seed 11 --threads 3"), 0)
        for name in ("manifest.json", "ensemble.csv", "moments_differences.csv"):
            self.assertEqual((first / name).read_bytes(), (second / name).read_bytes(), name)

    def test_other_seed_other_paths(self):
        first, second = self.tmp / "first", self.tmp / "second"
        self.run_experiment("simulate", self.CONFIG, first, "--seed 11")
        self.run_experiment("simulate", self.CONFIG, second, "--seed 12")
        self.assertNotEqual((first / "ensemble.csv").read_bytes(), (second / "ensemble.csv").read_bytes())

    def test_invalid_problem_exits_with_error(self):
        out = self.tmp / "never"
        with self.assertRaises(SystemExit) as context:
            self.execute("simulate", {"problem": {"domain": {"type": "ball", "radius": 0.0}}}, out)
        self.assertEqual(context.exception.code, EXIT_ERROR)
        self.assertFalse((out / "manifest.json").exists())


class TestSolveGBSDE(ExperimentTestCase):

    def test_trivial_value(self):
        # noise-free with g = 1: Y_0 = cos(0) + T
        out = self.tmp / "gbsde"
        code = self.run_experiment("solve-gbsde", {"fixture": "trivial", "gbsde": {"paths": 20, "steps": 20}}, out)
        self.assertEqual(code, 0)
        manifest = self.assertRecorded(out, code, "solve-gbsde")
        self.assertAlmostEqual(manifest.metrics["value"], 2.0, places=6)
        self.assertLess(manifest.metrics["error"], 1e-6)
        solution = pd.read_csv(out / "gbsde.csv")
        self.assertEqual(len(solution), 21)
        self.assertEqual(len(pd.read_csv(out / "growth.csv")), 3)
        record = orjson.loads((out / "gbsde.json").read_bytes())  # pylint: disable=no-member
        self.assertEqual(record["comparison"]["violations"], 0)
        self.assertIn("flow", record)


class TestTimeChange(ExperimentTestCase):

    def test_drift_reflection(self):
        out = self.tmp / "timechange"
        config = {
            "fixture": "drift-reflection",
            "timechange": {
                "paths": 200,
                "steps": 50,
                "epsilons": [0.2, 0.1],
                "equivalence": {
                    "paths": 200,
                    "steps": 200
                }
            },
        }
        code = self.run_experiment("timechange", config, out)
        manifest = self.assertRecorded(out, code, "timechange")
        self.assertIn("equivalence_difference", manifest.metrics)
        table = pd.read_csv(out / "representation.csv")
        self.assertEqual(list(table.columns), REPRESENTATION_COLUMNS)
        self.assertEqual(len(table), 2)
        clock = orjson.loads((out / "timechange.json").read_bytes())["clock"]  # pylint: disable=no-member
        self.assertLessEqual(clock["round_trip"], 1e-9)
        self.assertAlmostEqual(clock["a_t"] + clock["b_t"], 1.0, places=12)
        checks = (out / "checks.txt").read_text(encoding="utf-8")
        for name in ("density-sum", "round-trip", "clock-budget", "commutation", "equivalence"):
            self.assertIn(name, checks)


class TestDPP(ExperimentTestCase):

    def test_trivial(self):
        out = self.tmp / "dpp"
        config = {"fixture": "trivial", "dpp": {"h": 0.1, "delta": 0.05, "paths": 4, "probes": 3}}
        code = self.run_experiment("dpp", config, out)
        self.assertEqual(code, 0)
        manifest = self.assertRecorded(out, code, "dpp")
        self.assertLess(manifest.metrics["error"], 1e-6)
        for name in ("dpp_lower", "dpp_check_lower_weak", "dpp_check_lower_strong"):
            self.assertTrue((out / f"{name}.csv").is_file(), name)
        regularity = pd.read_csv(out / "regularity_lower.csv")
        self.assertEqual(list(regularity.columns), REGULARITY_COLUMNS)
        self.assertTrue(regularity["fitted"].any())
        record = orjson.loads((out / "dpp.json").read_bytes())  # pylint: disable=no-member
        self.assertLessEqual({"grid", "weak", "strong", "regularity"}, set(record["lower"]))


class TestCrossValidate(ExperimentTestCase):

    def test_trivial(self):
        out = self.tmp / "cross"
        config = {
            "fixture": "trivial",
            "cross_validate": {
                "resolutions": [{
                    "h": 0.1,
                    "layers": 20,
                    "paths": 4,
                    "steps": 10
                }]
            },
        }
        code = self.run_experiment("cross-validate", config, out)
        self.assertEqual(code, 0)
        self.assertRecorded(out, code, "cross-validate")
        table = pd.read_csv(out / "cross_validation.csv")
        self.assertEqual(list(table["t"]), [0.5, 0.9])
        # cos(pi x) + 1 - t at x = 0 and x = 0.5
        np.testing.assert_allclose(table["exact"], [1.5, 0.1], atol=1e-12)
        np.testing.assert_allclose(table["isaacs"], table["exact"], atol=1e-3)

    def test_needs_a_fixture(self):
        with self.assertRaises(SystemExit) as context:
            self.execute("cross-validate", {"problem": {"name": "custom"}}, self.tmp / "never")
        self.assertEqual(context.exception.code, EXIT_ERROR)


class TestCsvSchema(unittest.TestCase):

    def test_documented_columns(self):
        path = Path(refgame.__file__).parent / "assets" / "csv_schema.yml"
        tables = yaml.safe_load(path.read_text(encoding="utf-8"))
        for name, columns in (("violations", VIOLATION_COLUMNS), ("representation", REPRESENTATION_COLUMNS),
                              ("regularity_{kind}", REGULARITY_COLUMNS), ("convergence", CONVERGENCE_COLUMNS)):
            self.assertEqual(list(tables[name]["columns"]), columns, name)


if __name__ == '__main__':
    unittest.main()
