# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from refgame.cli.command import RefgameCommand
from refgame.cli.command.list.catalog import ListASourcesCommand, ListFamiliesCommand, ListFixturesCommand


class ListCommand(RefgameCommand):
    """Lists the built-in catalogs.

    list
    """

    commands = [
        ListFixturesCommand(),
        ListFamiliesCommand(),
        ListASourcesCommand(),
    ]

    def handle(self):
        self.call("help", "list")
