# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import numpy as np

from refgame.cli.command import ExperimentCommand
from refgame.game.dpp import CheckMode, dpp_check, dpp_value
from refgame.game.quadrature import DPPConfig
from refgame.game.regularity import regularity_check
from refgame.gbsde import SchemeOptions
from refgame.gbsde.regression import RegressionSpec
from refgame.log import get_child_logger
from refgame.model.value_grid import Kind

log = get_child_logger("dpp")


class DPPCommand(ExperimentCommand):
    """Runs the semi-Lagrangian recursion and checks the dynamic programming principle on its output.

    dpp
    """

    SECTION = "dpp"

    def run(self, config, spec, fixture, repository, reporter):
        section = config.dpp
        dpp_config = DPPConfig.from_config(section, spec.T)
        reg = RegressionSpec.from_config(section.regression)
        options = SchemeOptions.from_config(section.scheme)
        metrics: dict = {"h": section.h, "dt": dpp_config.delta}
        record: dict = {}

        for kind in map(Kind, section.kind):
            W = dpp_value(spec, kind, section.h, dpp_config, config.seed, config.threads)  # pylint: disable=invalid-name
            layers = np.unique(np.rint(np.linspace(0, len(W.times) - 1, section.report_layers)).astype(int))
            repository.store_table(f"dpp_{kind}", W.to_frame(layers.tolist()))
            record[kind.value] = {"grid": W.header()}

            for mode in map(CheckMode, section.modes):
                if section.probes == 0:
                    break
                check = dpp_check(spec, kind, W, mode, dpp_config, section.paths, config.seed, section.probes, reg,
                                  options, config.threads)
                repository.store_table(f"dpp_check_{kind}_{mode}", check.rows)
                record[kind.value][mode.value] = check.summary()
                reporter.verdict(f"dpp-{kind}-{mode}", check.within(),
                                 [f"mean residual {check.mean_residual:.3e}, mean stderr {check.mean_stderr:.3e}"])
                metrics[f"residual_{kind}_{mode}"] = check.mean_residual

            if section.regularity:
                regularity = regularity_check(W)
                repository.store_table(f"regularity_{kind}", regularity.table)
                record[kind.value]["regularity"] = regularity.summary()
                reporter.verdict(f"regularity-{kind}", regularity.passed,
                                 [f"C_x = {regularity.C_x:.4g}, C_t = {regularity.C_t:.4g}"])

            if fixture is not None and fixture.has_exact:
                exact = fixture.exact(kind, 0.0, W.mesh.points)
                error = float(np.max(np.abs(W.values[0] - exact)))
                record[kind.value]["error_t0"] = error
                metrics["error"] = max(metrics.get("error", 0.0), error)

        repository.store_record("dpp", record)
        return metrics
