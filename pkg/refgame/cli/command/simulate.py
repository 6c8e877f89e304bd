# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import numpy as np
import pandas as pd

from refgame import rsde
from refgame.cli.command import ExperimentCommand
from refgame.log import get_child_logger
from refgame.rsde.moments import InitialPair, moment_experiment

log = get_child_logger("simulate")


def step_summary(ensemble) -> pd.DataFrame:
    """Per step: t, mean state, mean and largest local time."""
    frame = pd.DataFrame({"step": np.arange(ensemble.steps + 1), "t": ensemble.times})
    for i in range(ensemble.X.shape[2]):
        frame[f"mean_x{i}"] = ensemble.X[:, :, i].mean(axis=0)
    frame["mean_eta"] = ensemble.eta.mean(axis=0)
    frame["max_eta"] = ensemble.eta.max(axis=0)
    return frame


class SimulateCommand(ExperimentCommand):
    """Simulates reflected paths under constant controls.

    simulate
    """

    SECTION = "simulate"

    def run(self, config, spec, fixture, repository, reporter):
        section = config.simulate
        u_policy, v_policy = self.policies(spec, section.controls)
        x0 = self.state(spec, section.x0)
        ensemble = rsde.simulate(spec,
                                 u_policy,
                                 v_policy,
                                 section.t0,
                                 x0,
                                 section.paths,
                                 section.steps,
                                 config.seed,
                                 threads=config.threads,
                                 antithetic=section.antithetic)
        repository.store_table("ensemble", step_summary(ensemble))
        if section.dump_paths:
            repository.store_table("paths", ensemble.to_frame())

        phi = spec.domain.phi(ensemble.X.reshape(-1, spec.state_dimension))
        reporter.verdict("states-in-closure", bool(np.all(phi >= -spec.domain.boundary_tol)),
                         [f"phi reached {phi.min():.3e}"])
        reporter.verdict("local-time-nondecreasing", bool(np.all(ensemble.d_eta >= 0.0)))
        metrics = {
            "paths": section.paths,
            "steps": section.steps,
            "mean_eta_T": float(ensemble.eta[:, -1].mean()),
        }

        if section.moments.enabled:
            metrics.update(self._moments(section, spec, u_policy, v_policy, x0, config, repository, reporter))
        return metrics

    def _moments(self, section, spec, u_policy, v_policy, x0, config, repository, reporter) -> dict:
        t0 = section.t0
        offset = np.zeros(spec.state_dimension)
        offset[0] = 1.0
        pairs = [InitialPair(t0, x0, t0, x0)]
        for separation in section.moments.separations:
            pairs.append(InitialPair(t0, x0, t0, x0 + separation * offset))
            if t0 + separation < spec.T:
                pairs.append(InitialPair(t0, x0, t0 + separation, x0))
        tables = moment_experiment(spec, u_policy, v_policy, pairs, section.paths, section.steps, config.seed,
                                   section.moments.lambdas, config.threads)
        repository.store_table("moments_differences", tables.differences)
        repository.store_table("moments_exponential", tables.exponential)

        coupled = tables.differences.iloc[0]
        reporter.verdict("coupled-identical-zero", coupled["sup_x4"] == 0.0 and coupled["sup_eta4"] == 0.0,
                         [f"identical inputs differ: {coupled['sup_x4']:.3e}, {coupled['sup_eta4']:.3e}"])
        ratios = tables.differences["ratio"].iloc[1:]
        bound = float(ratios.max()) if len(ratios) else 0.0
        reporter.verdict("moment-ratio-finite", bool(np.isfinite(bound)), [f"ratio {bound}"])
        return {"moment_constant": bound}
