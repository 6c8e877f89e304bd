# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Isaacs equation with nonlinear Neumann boundary: Hamiltonians, solver, residuals and checks."""
