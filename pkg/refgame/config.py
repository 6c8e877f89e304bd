# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Experiment configuration.

An experiment is described by one file (JSON or YAML) plus the options of the
command line. Both sources are checked against the same cerberus schema, which
is assembled from the base keys below, the problem schema of the dynamics
factory and one section per subcommand. Unknown keys are reported, never
dropped.
"""

from __future__ import annotations

import os
from collections.abc import Generator, Mapping, MutableMapping
from copy import deepcopy
from pathlib import Path
from typing import Any

import yaml
from cerberus import TypeDefinition, Validator
from cerberus.errors import REQUIRED_FIELD, BasicErrorHandler, ValidationError
from str_to_bool import str_to_bool as strtobool

from refgame.errors import ConfigError, NotOverriddenError

OUT_DIR_ENV = "REFGAME_OUT_DIR"
DEFAULT_OUT_DIR = Path("./runs")

# see: https://docs.python-cerberus.org/en/stable/index.html
BASE_SCHEMA: dict = {
    "fixture": {
        "type": "string",
        "coerce": "strip_str",
        "nullable": True,
        "default": None,
        "meta": {
            "description": "Name of a built-in fixture; mutually exclusive with 'problem'"
        },
    },
    "problem": {
        "type": "dict",
        "nullable": True,
        "default": None,
        # filled in by get_assembled_schema
        "schema": {},
    },
    "seed": {
        "type": "integer",
        "min": 0,
        "default": 0,
        "meta": {
            "long_name": "seed",
            "description": "Seed of all random streams (overrides the config file)"
        },
    },
    "threads": {
        "type": "integer",
        "min": 1,
        "default": 1,
        "meta": {
            "long_name": "threads",
            "description": "Number of worker threads; results do not depend on it"
        },
    },
    "output": {
        "type": "path",
        "nullable": True,
        "default": None,
        "meta": {
            "long_name": "out",
            "description": f"Output directory of the run artifacts (default: ${OUT_DIR_ENV} or {DEFAULT_OUT_DIR})"
        },
    },
}


def get_assembled_schema(problem_schema: dict, section_schemas: Mapping[str, dict]) -> dict:
    """The full experiment schema: base keys, the problem and one dict per command section."""
    schema: dict = deepcopy(BASE_SCHEMA)
    schema["problem"]["schema"].update(problem_schema)
    schema.update({name: {"type": "dict", "default": {}, "schema": deepcopy(rules)} for name, rules in section_schemas.items()})
    return schema


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV) or DEFAULT_OUT_DIR)


def iterate_schema(schema: Mapping, _path: tuple[str, ...] = (),
                   _prefix: tuple[str, ...] = ()) -> Generator[tuple[list[str], Mapping]]:
    """Walk the leaves of a schema depth first.

    The `long_name` of a leaf is prefixed with the long names of its parents,
    joined by dashes.

    Yields:
        tuple: key path of the leaf and a copy of its rules.
    """
    for key, rules in schema.items():
        long_name = rules.get("meta", {}).get("long_name")
        prefix = _prefix + ((long_name,) if long_name else ())
        if rules["type"] == "dict" and rules.get("schema"):
            yield from iterate_schema(rules["schema"], _path + (key,), prefix)
            continue
        leaf = deepcopy(rules)
        if long_name:
            leaf["meta"]["long_name"] = "-".join(prefix)
        yield [*_path, key], leaf


def validate(config: Mapping, schema: Mapping[str, Any], partial: bool = False) -> tuple[dict | None, list[str]]:
    """Normalize and validate `config`.

    A partial document (one source of several) gets no defaults and no
    required checks.

    Returns:
        tuple: the normalized document, or None, and the reasons it was rejected.
    """
    validator = ConfigValidator(schema, ignore_defaults=partial)
    if validator.validate(config, update=partial):
        return validator.document, []
    reasons = []
    for error in validator.errors:
        where = ".".join(str(part) for part in error["path"])
        if error["code"] == REQUIRED_FIELD.code:
            reasons.append(f"missing option '{where}'.")
        else:
            reasons.append(f"invalid option '{where}': {error['msg']}")
    return None, reasons


def plain(value: Any) -> Any:
    """Nested plain dicts/lists of a config, e.g. for hashing."""
    if isinstance(value, Mapping):
        return {k: plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    return value


class Config(MutableMapping):
    """Nested experiment configuration.

    Besides plain item access, a list of keys walks into sub-configs and
    attributes read items, so these are the same value:
        - config["gbsde"]["regression"]["basis"]
        - config[["gbsde", "regression", "basis"]]
        - config.gbsde.regression.basis
    Assigning through a key list creates the missing sub-configs.
    """

    def __init__(self, mapping: Mapping | None = None) -> None:
        object.__setattr__(self, "_items", {})
        self.update(mapping or {})

    def _branch(self, keys: list, create: bool) -> Config:
        node = self
        for key in keys:
            child = node._items.get(key)
            if not isinstance(child, Config):
                if not create:
                    raise KeyError(key)
                child = node._items[key] = Config()
            node = child
        return node

    def __getitem__(self, key):
        if isinstance(key, list):
            return self._branch(key[:-1], create=False)._items[key[-1]]
        return self._items[key]

    def __setitem__(self, key, value):
        node = self
        if isinstance(key, list):
            node, key = self._branch(key[:-1], create=True), key[-1]
        node._items[key] = Config(value) if isinstance(value, Mapping) and not isinstance(value, Config) else value

    def __getattr__(self, key):
        try:
            return self._items[key]
        except KeyError:
            raise AttributeError(key) from None

    def __setattr__(self, key, value):
        self[key] = value

    def __delitem__(self, key):
        del self._items[key]

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def __repr__(self):
        return f"Config({self._items!r})"


class ConfigValidator(Validator):
    """cerberus validator with a `path` type, string coercion and flat errors.

    Values coming from the command line are strings; fields without an
    explicit `coerce` rule get the coercion matching their type.
    """

    STRING_COERCIONS = {
        "boolean": "boolean",
        "float": "float",
        "integer": "integer",
        "list": "semicolon_list",
        "path": "path",
    }

    class FlatErrorHandler(BasicErrorHandler):

        def __call__(self, errors: list[ValidationError]) -> list[dict]:
            return list(self._flatten(errors))

        def _flatten(self, errors: list[ValidationError]) -> Generator[dict]:
            for error in errors:
                if error.is_logic_error:
                    for nested in error.definitions_errors.values():
                        yield from self._flatten(nested)
                elif error.is_group_error:
                    yield from self._flatten(error.child_errors)
                elif error.code in self.messages:
                    yield {
                        "path": list(error.document_path),
                        "code": error.code,
                        "msg": self._format_message(error.field, error),
                    }

    def __init__(self, *args: Any, **kwargs: Any):
        self.types_mapping["path"] = TypeDefinition("path", (Path,), ())
        super().__init__(*args, **kwargs)
        self.ignore_defaults = kwargs.get("ignore_defaults", False)
        self.allow_unknown = False
        self.purge_unknown = False
        self.error_handler = self.FlatErrorHandler()

    def _normalize_coerce(self, mapping, schema):
        """\
        {'oneof': [
            {'type': 'callable'},
            {'type': 'list',
             'schema': {'oneof': [{'type': 'callable'},
                                  {'type': 'string'}]}},
            {'type': 'string'}
        ]}
        """
        for field, value in mapping.items():
            rules = schema.get(field)
            if isinstance(value, str) and rules and "coerce" not in rules:
                coercion = self.STRING_COERCIONS.get(rules.get("type"))
                if coercion:
                    rules["coerce"] = coercion
        super()._normalize_coerce(mapping, schema)

    def _normalize_default(self, mapping: Mapping, schema: Mapping[str, Any], field: str) -> None:
        """ {'nullable': True} """
        if not self.ignore_defaults:
            mapping[field] = deepcopy(schema[field]["default"])

    def _normalize_coerce_strip_str(self, value: Any) -> Any:
        # non-strings are left to the type check
        return value.strip() if isinstance(value, str) else value

    def _normalize_coerce_boolean(self, value: Any) -> bool:
        return value if isinstance(value, bool) else bool(strtobool(value))

    def _normalize_coerce_float(self, value: Any) -> float:
        return float(value.strip() if isinstance(value, str) else value)

    def _normalize_coerce_integer(self, value: Any) -> int:
        return int(value.strip() if isinstance(value, str) else value)

    def _normalize_coerce_semicolon_list(self, value: list | str) -> list:
        """'a; b' -> ['a', 'b']"""
        return value if isinstance(value, list) else [item.strip() for item in value.split(";")]

    def _normalize_coerce_path(self, value: Any) -> Path:
        return value if isinstance(value, Path) else Path(str(value).strip())


class ConfigLoader:
    """A source of (part of) an experiment configuration."""

    def load(self) -> Config:
        """Read the source and check it against the schema.

        Raises:
            ConfigError: the source cannot be read or breaks the schema.
        """
        raise NotOverriddenError()


def _checked(document: Mapping, schema: Mapping, where: str, partial: bool = True) -> Config:
    validated, reasons = validate(document, schema, partial=partial)
    if reasons:
        raise ConfigError(f"There is one or more errors in {where}:\n    " + "\n    ".join(reasons), reasons)
    return Config(validated)


class CliConfigLoader(ConfigLoader):
    """The options given on the command line; unset options are None and skipped."""

    def __init__(self, schema: Mapping, options: Mapping | None) -> None:
        self._schema = schema
        self._options = options or {}

    def load(self) -> Config:
        return _checked(_drop_none(self._options), self._schema, "the command line options")


class YamlFileConfigLoader(ConfigLoader):
    """The experiment file; JSON is read as the YAML subset it is."""

    def __init__(self, schema: Mapping, path: str | Path | None) -> None:
        self._schema = schema
        self._path = None if path is None else Path(path)

    def load(self) -> Config:
        if self._path is None:
            return Config()
        try:
            document = yaml.safe_load(self._path.read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as err:
            raise ConfigError(f"Failed to load the experiment config: {err}", [str(err)]) from err
        if not isinstance(document, Mapping):
            raise ConfigError(f"The experiment config '{self._path}' is not a mapping", [f"not a mapping: {self._path}"])
        return _checked(document, self._schema, f"the configuration file '{self._path}'")


class ExperimentConfigLoader(ConfigLoader):
    """The complete experiment: sources merged (earlier ones win), defaults filled in.

    Exactly one of 'fixture' and 'problem' must be set; the output directory
    falls back to `default_out_dir`.
    """

    def __init__(self, schema: Mapping, *loaders: ConfigLoader) -> None:
        self._schema = schema
        self._loaders = loaders

    def load(self) -> Config:
        merged = Config()
        for config in reversed([loader.load() for loader in self._loaders]):
            _merge_into(merged, config)
        config = _checked(plain(merged), self._schema, "the configuration", partial=False)

        match (config.fixture, config.problem):
            case (None, None):
                raise ConfigError("The configuration names neither a 'fixture' nor a 'problem'",
                                  ["missing option 'fixture'."])
            case (str(), Mapping()):
                raise ConfigError("The configuration names both a 'fixture' and a 'problem'",
                                  ["invalid option 'problem': excluded by 'fixture'"])
        if config.output is None:
            config.output = default_out_dir()
        return config


def _drop_none(mapping: Mapping) -> dict:
    kept = {}
    for key, value in mapping.items():
        if isinstance(value, Mapping):
            value = _drop_none(value) or None
        if value is not None:
            kept[key] = value
    return kept


def _merge_into(target: Config, source: Mapping) -> None:
    for key, value in source.items():
        if isinstance(value, Mapping) and isinstance(target.get(key), Mapping):
            _merge_into(target[key], value)
        else:
            target[key] = plain(value)


def effective_config_info(config: Config, schema: Mapping) -> Generator[str]:
    """`key.path=value` of every schema leaf set in `config`."""
    for path, _ in iterate_schema(schema):
        try:
            yield f"{'.'.join(path)}={config[path]}"
        except KeyError:
            continue
