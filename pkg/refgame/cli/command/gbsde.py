# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import numpy as np
import pandas as pd

from refgame import rsde
from refgame.cli.command import ExperimentCommand
from refgame.dynamics import shifted
from refgame.gbsde import SchemeOptions, solve_on_ensemble
from refgame.gbsde.checks import apriori_constant, comparison_check, difference_ratio, growth_table
from refgame.gbsde.regression import RegressionSpec
from refgame.gbsde.semigroup import flow_check
from refgame.log import get_child_logger

log = get_child_logger("solve-gbsde")


def solution_table(solution) -> pd.DataFrame:
    """Per step: t, mean and standard deviation of Y, mean |Z|."""
    z_norm = np.linalg.norm(solution.Z, axis=2).mean(axis=0)
    return pd.DataFrame({
        "step": np.arange(len(solution.times)),
        "t": solution.times,
        "mean_y": solution.Y.mean(axis=0),
        "std_y": solution.Y.std(axis=0),
        "mean_abs_z": np.append(z_norm, np.nan),
        "condition": np.append(solution.condition, np.nan),
    })


class SolveGBSDECommand(ExperimentCommand):
    """Solves the controlled GBSDE backward on simulated paths and checks its estimates.

    solve-gbsde
    """

    SECTION = "gbsde"

    def run(self, config, spec, fixture, repository, reporter):
        section = config.gbsde
        reg = RegressionSpec.from_config(section.regression)
        options = SchemeOptions.from_config(section.scheme)
        u_policy, v_policy = self.policies(spec, section.controls)
        x0 = self.state(spec, section.x0)
        ensemble = rsde.simulate(spec,
                                 u_policy,
                                 v_policy,
                                 section.t,
                                 x0,
                                 section.paths,
                                 section.steps,
                                 config.seed,
                                 threads=config.threads)
        solution = solve_on_ensemble(ensemble, spec, u_policy, v_policy, spec.coeffs.Phi, reg, options)
        repository.store_table("gbsde", solution_table(solution))
        record = {"solution": solution.summary()}
        metrics = {"value": solution.value, "stderr": solution.stderr, "paths": section.paths, "dt": float(ensemble.dt[0])}

        # the game value equals the solution only without a choice of controls
        if fixture is not None and fixture.has_exact and len(spec.controls_U) == 1 and len(spec.controls_V) == 1:
            exact = float(fixture.exact("lower", section.t, x0)[0])
            metrics["error"] = abs(solution.value - exact)
            record["exact"] = exact

        if section.comparison_shift is not None:
            upper = shifted(spec, terminal=section.comparison_shift, generator=section.comparison_shift)
            comparison = comparison_check(ensemble, spec, upper, u_policy, v_policy, reg)
            record["comparison"] = {"violations": comparison.violations, "max_violation": comparison.max_violation}
            reporter.verdict("comparison", comparison.passed,
                             [f"{comparison.violations} point(s) out of order, max excess {comparison.max_violation:.3e}"])
            metrics["difference_ratio"] = difference_ratio(ensemble, spec, upper, u_policy, v_policy, reg)

        metrics["apriori_constant"] = apriori_constant(ensemble, spec, u_policy, v_policy, reg, options)

        offset = np.zeros(spec.state_dimension)
        offset[0] = 1.0
        states = [x0 + radius * offset for radius in section.growth_radii]
        growth = growth_table(spec, u_policy, v_policy, states, section.t, section.paths, section.steps, config.seed,
                              reg, config.threads)
        repository.store_table("growth", growth)
        metrics["growth_constant"] = float(growth["ratio"].max())

        if section.flow_s is not None and section.t < section.flow_s < spec.T:
            flow = flow_check(spec, section.t, x0, u_policy, v_policy, section.flow_s, section.paths, section.steps,
                              config.seed, reg, options, config.threads)
            record["flow"] = {"direct": flow.direct, "nested": flow.nested, "residual": flow.residual,
                              "stderr": flow.stderr, "s": flow.s}
            reporter.verdict("flow", flow.within(), [f"residual {flow.residual:.3e} (stderr {flow.stderr:.3e})"])

        repository.store_record("gbsde", record)
        return metrics
