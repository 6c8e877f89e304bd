# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Value functions by dynamic programming over one-step feedback strategies, and their checks."""
