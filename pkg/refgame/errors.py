# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations


class RefgameError(Exception):
    pass


class ConfigError(RefgameError):

    def __init__(self, msg: str, reasons: list[str]) -> None:
        super().__init__(msg)
        self.reasons = reasons


class NotOverriddenError(RefgameError, NotImplementedError):
    pass


class NonConvergence(RefgameError):
    pass


class InvalidInitialState(RefgameError):
    pass


class SingularRegression(RefgameError):
    pass


class NotMonotone(RefgameError):
    pass


class CFLViolation(RefgameError):
    pass


class Divergence(RefgameError):
    pass


class MeshMismatch(RefgameError):
    pass


class CheckFailure(RefgameError):

    def __init__(self, msg: str, reasons: list[str] | None = None) -> None:
        super().__init__(msg)
        self.reasons = reasons or []


class MissingManifest(RefgameError):
    pass


class SerializerError(RefgameError):
    pass


class RepositoryError(RefgameError):
    pass
