# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import re
from collections.abc import Mapping
from pathlib import Path
from typing import Any, NoReturn

import numpy as np
from cleo import Command
from clikit.api.args.format import Option

from refgame.cli.sections import SECTIONS
from refgame.config import (BASE_SCHEMA, CliConfigLoader, Config, ExperimentConfigLoader, YamlFileConfigLoader,
                            effective_config_info, get_assembled_schema, iterate_schema)
from refgame.dynamics import ProblemSpec
from refgame.dynamics import factory as problem_factory
from refgame.dynamics.factory import ProblemFactory
from refgame.dynamics.fixtures import Fixture, FixtureCatalog
from refgame.dynamics.policy import ConstantPolicy
from refgame.errors import CheckFailure, ConfigError, NotOverriddenError, RefgameError
from refgame.log import get_child_logger
from refgame.model.manifest import RunManifest, config_hash
from refgame.reporter import CountingReporter, Reporter
from refgame.reporter.file import FileReporter
from refgame.repository.run_workdir import RunRepositoryWorkdir

log = get_child_logger("cli")

EXIT_ERROR = 1
EXIT_CHECK_FAILURE = 2

# options every experiment offers on the command line
_BASE_OPTION_KEYS = ("seed", "threads", "output")


class RefgameCommand(Command):

    def _load_config_schema(self) -> dict:
        return get_assembled_schema(problem_factory.CONFIG_SCHEMA, SECTIONS)

    @staticmethod
    def _normalize_option_name(name: str) -> str:
        pattern = re.compile(r"[^a-z0-9]")
        return re.sub(pattern, "-", name)

    def _add_options_from_schema(self, schema: Mapping, prefix=None) -> None:
        for _, rule in iterate_schema(schema):
            meta = rule.get("meta", {})
            short_name = meta.get("short_name")
            long_name = meta.get("long_name")
            if not (short_name or long_name):
                continue
            if long_name:
                if prefix:
                    short_name = None
                    long_name = prefix + long_name
                long_name = self._normalize_option_name(long_name)
            self._config.add_option(
                long_name=long_name,
                short_name=short_name,
                flags=Option.NO_VALUE if rule.get("type") == "boolean" else Option.REQUIRED_VALUE,
                description=meta.get("description"),
            )

    def _get_options_from_schema(self, schema, prefix=None) -> Mapping:
        config = Config()
        for key, rule in iterate_schema(schema):
            meta = rule.get("meta", {})
            long_name = meta.get("long_name")
            if not long_name:
                continue
            if prefix:
                long_name = prefix + long_name
            value = self.option(self._normalize_option_name(long_name))
            # an absent flag must not override the experiment file
            if rule.get("type") == "boolean" and not value:
                value = None
            config[key] = value
        return config


class ExperimentCommand(RefgameCommand):
    """An experiment on one problem, storing its artifacts and a manifest in the output directory.

    Subclasses name their config `SECTION` and implement `run`.
    """

    SECTION: str = ""
    NEEDS_FIXTURE = False

    def __init__(self):
        super().__init__()
        self._config_schema = self._load_config_schema()
        self._add_options_from_schema(self._cli_schema())

    def _cli_schema(self) -> dict:
        schema = {key: self._config_schema[key] for key in _BASE_OPTION_KEYS}
        schema[self.SECTION] = self._config_schema[self.SECTION]
        return schema

    def _load_config(self) -> Config:
        cli_options = self._get_options_from_schema(self._cli_schema())

        # normalize and validate config
        cli_config_loader = CliConfigLoader(self._config_schema, cli_options)
        yaml_config_loader = YamlFileConfigLoader(self._config_schema, self.option("config"))
        # the order specifies the priority of the options (CLI before file)
        config = ExperimentConfigLoader(self._config_schema, cli_config_loader, yaml_config_loader).load()
        for line in effective_config_info(config, {k: BASE_SCHEMA[k] for k in _BASE_OPTION_KEYS}):
            log.info("config: %s", line)
        return config

    def _resolve_problem(self, config: Config) -> tuple[Fixture | None, ProblemSpec]:
        if config.fixture is not None:
            fixture = FixtureCatalog.get(config.fixture)
            return fixture, fixture.build()
        if self.NEEDS_FIXTURE:
            raise ConfigError(f"'{self.name}' needs a fixture with a closed-form value",
                              ["missing option 'fixture'."])
        return None, ProblemFactory.from_config(config.problem)

    @staticmethod
    def state(spec: ProblemSpec, values) -> np.ndarray:
        """A configured state, the origin when not given."""
        if values is None:
            return np.zeros(spec.state_dimension)
        state = np.asarray(values, dtype=float)
        if state.shape != (spec.state_dimension,):
            raise ConfigError(f"expected a state of dimension {spec.state_dimension}, got {list(values)}",
                              [f"invalid state {list(values)}"])
        return state

    @staticmethod
    def policies(spec: ProblemSpec, controls: Mapping) -> tuple[ConstantPolicy, ConstantPolicy]:
        try:
            return ConstantPolicy(spec.controls_U, controls.get("u", 0)), ConstantPolicy(spec.controls_V,
                                                                                        controls.get("v", 0))
        except IndexError as err:
            raise ConfigError(f"invalid control index: {err}", [str(err)]) from err

    def _fail(self, err: Exception, code: int) -> NoReturn:
        log.error("%s", err)
        self.line_error(str(err), style="error")
        raise SystemExit(code) from err

    def handle(self):
        try:
            config = self._load_config()
            fixture, spec = self._resolve_problem(config)
        except (RefgameError, ValueError) as err:
            self._fail(err, EXIT_ERROR)

        repository = RunRepositoryWorkdir(Path(config.output))
        reporter = CountingReporter(FileReporter(repository.checks_path))
        try:
            metrics = self.run(config, spec, fixture, repository, reporter)
            repository.store_manifest(
                RunManifest(command=self.name,
                            fixture=fixture.name if fixture else spec.name,
                            config_hash=config_hash(config),
                            seed=config.seed,
                            metrics=metrics,
                            passed=not reporter.failures))
            if reporter.failures:
                raise CheckFailure(f"{len(reporter.failures)} check(s) failed: {', '.join(reporter.failures)}",
                                   reporter.failures)
        except CheckFailure as err:
            self._fail(err, EXIT_CHECK_FAILURE)
        except (RefgameError, ValueError) as err:
            self._fail(err, EXIT_ERROR)
        finally:
            reporter.close()
        log.info("%s finished, artifacts in '%s'", self.name, config.output)

    def run(self, config: Config, spec: ProblemSpec, fixture: Fixture | None, repository: RunRepositoryWorkdir,
            reporter: Reporter) -> dict[str, Any]:
        """Run the experiment, store its artifacts and report its checks.

        Returns:
            dict: Headline metrics written to the manifest.
        """
        raise NotOverriddenError()
