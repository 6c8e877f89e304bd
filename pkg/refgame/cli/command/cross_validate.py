# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from refgame.cli.command import ExperimentCommand
from refgame.game.cross_validate import DEFAULT_PROBES, Resolution, cross_validate
from refgame.gbsde import SchemeOptions
from refgame.gbsde.regression import RegressionSpec
from refgame.log import get_child_logger
from refgame.model.value_grid import Kind

log = get_child_logger("cross-validate")


class CrossValidateCommand(ExperimentCommand):
    """Compares the PDE solution, the dynamic programming recursion and Monte Carlo at probe points.

    cross-validate
    """

    SECTION = "cross_validate"
    NEEDS_FIXTURE = True

    def run(self, config, spec, fixture, repository, reporter):
        section = config.cross_validate
        resolutions = [Resolution.from_config(r) for r in section.resolutions]
        probes = DEFAULT_PROBES if section.probes is None else [(p["t"], p["x"]) for p in section.probes]
        result = cross_validate(fixture, resolutions, probes, section.kinds, config.seed,
                                RegressionSpec.from_config(section.regression), SchemeOptions.from_config(section.scheme),
                                config.threads)
        table = result.table
        repository.store_table("cross_validation", table)
        reporter.verdict("agreement", result.agrees(section.tolerance),
                         [f"max pairwise difference {result.max_difference():.4g}"])

        metrics = {"max_difference": result.max_difference(), "h": resolutions[-1].h}
        if {Kind.LOWER.value, Kind.UPPER.value} <= set(table["kind"]):
            lower = table[table["kind"] == Kind.LOWER.value]["isaacs"].to_numpy()
            upper = table[table["kind"] == Kind.UPPER.value]["isaacs"].to_numpy()
            reporter.verdict("lower-below-upper", bool((lower <= upper + 1e-12).all()),
                             [f"max excess {(lower - upper).max():.3e}"])
        if table["exact"].notna().any():
            metrics["error"] = float((table["isaacs"] - table["exact"]).abs().max())
        return metrics
