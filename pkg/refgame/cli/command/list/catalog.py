# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from refgame.cli.command import RefgameCommand
from refgame.dynamics.factory import FamilyFactory
from refgame.dynamics.families import FAMILIES
from refgame.dynamics.fixtures import FixtureCatalog
from refgame.geometry.factory import DomainFactory
from refgame.timechange import ASourceFactory


class ListFixturesCommand(RefgameCommand):
    """List available fixtures.

    fixtures
    """

    def handle(self):
        for name in FixtureCatalog.list_available_fixtures():
            fixture = FixtureCatalog.get(name)
            exact = "closed form" if fixture.has_exact else "no closed form"
            self.line(f"{name:<18} {fixture.description} ({exact})")


class ListFamiliesCommand(RefgameCommand):
    """List available domain types and coefficient families per role.

    families
    """

    def handle(self):
        self.line(f"domain: {', '.join(DomainFactory.list_available_domains())}")
        for role in FAMILIES:
            self.line(f"{role}: {', '.join(FamilyFactory.list_available_families(role))}")


class ListASourcesCommand(RefgameCommand):
    """List available sources of the increasing process A.

    a-sources
    """

    def handle(self):
        for name in ASourceFactory.list_available_sources():
            self.line(name)
