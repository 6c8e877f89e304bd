# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import logging
import logging.config
import time
from collections.abc import Generator
from contextlib import contextmanager

app_logger = logging.getLogger("refgame")


def configure_logger(level: str, format: str, output_stream, error_stream) -> None:
    """Route all records of the application logger to the error stream.

    `output_stream` stays reserved for artifacts and command output,
    see <https://clig.dev/#the-basics>.
    """
    # pylint: disable=redefined-builtin,unused-argument
    logging_config = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "message_only": {
                "format": format
            },
        },
        "handlers": {
            "stderr": {
                "class": "logging.StreamHandler",
                "formatter": "message_only",
                "stream": error_stream
            },
        },
        "loggers": {
            "refgame": {
                "level": level.upper(),
                "propagate": True
            },
            # numpy floating point warnings arrive through `warnings`
            "py.warnings": {
                "level": "WARNING",
                "propagate": True
            },
        },
        "root": {
            "handlers": ["stderr"],
            "level": "ERROR",
        },
    }
    logging.config.dictConfig(logging_config)
    logging.captureWarnings(True)


def get_child_logger(suffix: str) -> logging.Logger:
    return app_logger.getChild(suffix)


@contextmanager
def timed(logger: logging.Logger, label: str) -> Generator[None]:
    start = time.perf_counter()
    logger.info("%s ...", label)
    try:
        yield
    finally:
        logger.info("%s - done in %.3fs", label, time.perf_counter() - start)
