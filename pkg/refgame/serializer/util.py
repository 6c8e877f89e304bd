# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import io
from enum import Enum
from pathlib import Path

import numpy as np
import orjson
import pandas as pd

from refgame.errors import SerializerError

FLOAT_FORMAT = "%.17g"


def _json_native(value):
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if isinstance(value, tuple):
        return list(value)
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError


def _dumps(obj, option: int) -> bytes:
    try:
        return orjson.dumps(obj, default=_json_native, option=option | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY)
    except (TypeError, orjson.JSONEncodeError) as err:
        raise SerializerError(f"failed to serialize JSON: {err}") from err


def json_serialize(obj) -> str:
    """Indented, key-sorted JSON of the run records."""
    return _dumps(obj, orjson.OPT_APPEND_NEWLINE | orjson.OPT_INDENT_2).decode("utf-8")


def canonical_json(obj) -> bytes:
    """Compact, key-sorted encoding, the input of config hashes."""
    return _dumps(obj, 0)


def csv_serialize(frame: pd.DataFrame) -> str:
    """Floats with 17 significant digits, so equal tables give equal files."""
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()
