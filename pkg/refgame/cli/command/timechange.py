# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import numpy as np

from refgame import rsde
from refgame.cli.command import ExperimentCommand
from refgame.gbsde import SchemeOptions
from refgame.gbsde.regression import RegressionSpec
from refgame.log import get_child_logger
from refgame.timechange import ASourceFactory, build
from refgame.timechange.equivalence import COMMUTATION_TOL, commutation_check, equivalence_check
from refgame.timechange.representation import representation_limit

log = get_child_logger("timechange")

CLOCK_TOL = 1e-9
DENSITY_SUM_TOL = 1e-15
EQUIVALENCE_TOL = 1e-2
RELATIVE_ERROR = 0.05


def decreasing_within(errors: np.ndarray, stderr: np.ndarray, sigmas: float = 3.0) -> bool:
    """Each error is at most the previous one plus `sigmas` standard errors of either."""
    slack = sigmas * np.maximum(stderr[1:], stderr[:-1])
    return bool(np.all(errors[1:] <= errors[:-1] + slack))


class TimeChangeCommand(ExperimentCommand):
    """Checks the random time change and the small-horizon representation of generators.

    timechange
    """

    SECTION = "timechange"

    def run(self, config, spec, fixture, repository, reporter):
        section = config.timechange
        reg = RegressionSpec.from_config(section.regression)
        options = SchemeOptions.from_config(section.scheme)
        source = section.a_source
        a_function = ASourceFactory.get(source) if ASourceFactory.is_deterministic(source.type) else None
        z = np.zeros(spec.brownian_dimension) if section.z is None else np.asarray(section.z, dtype=float)
        eps = np.asarray(section.epsilons, dtype=float)

        table = representation_limit(spec, section.t, section.y, z, a_function, eps, section.paths, section.steps,
                                     config.seed, self.state(spec, section.x0), reg, options, config.threads)
        repository.store_table("representation", table)
        errors, stderr = table["abs_error"].to_numpy(), table["stderr"].to_numpy()
        final, target = float(errors[-1]), float(table["target"].iloc[-1])
        reporter.verdict("representation-decreasing", decreasing_within(errors, stderr),
                         [f"errors {np.round(errors, 5).tolist()}"])
        reporter.verdict("representation-limit", final <= RELATIVE_ERROR * max(abs(target), 1.0),
                         [f"final error {final:.4g} against target {target:.6g}"])
        metrics = {"final_error": final, "target": target, "epsilon": float(eps[-1])}
        record: dict = {"a_source": dict(source)}

        if a_function is not None:
            s_grid = rsde.uniform_grid(section.t, section.t + float(eps.max()), section.clock_nodes - 1)
            clock = build(s_grid, a_function(s_grid))
            density_sum = float(np.max(np.abs(clock.a + clock.b - 1.0)))
            round_trip = clock.round_trip_error()
            budget = float(np.max(np.abs(clock.clock_budget_error(eps))))
            commutation = commutation_check(clock, np.cos, float(clock.r[-1]))
            reporter.verdict("density-sum", density_sum <= DENSITY_SUM_TOL, [f"max |a + b - 1| = {density_sum:.3e}"])
            reporter.verdict("round-trip", round_trip <= CLOCK_TOL, [f"max |psi(tau(r)) - r| = {round_trip:.3e}"])
            reporter.verdict("clock-budget", budget <= CLOCK_TOL, [f"max budget error {budget:.3e}"])
            reporter.verdict("commutation", commutation <= COMMUTATION_TOL, [f"difference {commutation:.3e}"])
            record["clock"] = {
                "density_sum": density_sum,
                "round_trip": round_trip,
                "budget": budget,
                "commutation": commutation,
                "a_t": float(clock.a[0]),
                "b_t": float(clock.b[0]),
            }

            equivalence = section.equivalence
            if equivalence.enabled:
                result = equivalence_check(spec, a_function, equivalence.t, equivalence.horizon,
                                           lambda b: np.full(len(b), equivalence.terminal), equivalence.paths,
                                           equivalence.steps, config.seed, reg, options, config.threads)
                reporter.verdict("equivalence", result.difference <= EQUIVALENCE_TOL,
                                 [f"{result.original:.8g} vs {result.changed:.8g}"])
                record["equivalence"] = {
                    "original": result.original,
                    "changed": result.changed,
                    "difference": result.difference,
                    "stderr": result.stderr,
                }
                metrics["equivalence_difference"] = result.difference

        repository.store_record("timechange", record)
        return metrics
