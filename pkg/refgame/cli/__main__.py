# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from refgame.cli import main

main()
