# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import numpy as np
import pandas as pd

from refgame.cli.command import ExperimentCommand
from refgame.dynamics import shifted
from refgame.isaacs.checks import comparison_check, monotonicity_probe
from refgame.isaacs.residual import viscosity_residual
from refgame.isaacs.scheme import SchemeParams, solve
from refgame.log import get_child_logger
from refgame.model.value_grid import Kind, ValueGrid

log = get_child_logger("solve-pde")


def value_table(grid: ValueGrid, times: np.ndarray) -> pd.DataFrame:
    """Values at the mesh nodes at the given times, interpolated linearly between layers."""
    frames = []
    for t in times:
        frame = pd.DataFrame({"t": np.full(grid.mesh.node_count, t)})
        for i in range(grid.mesh.dimension):
            frame[f"x{i}"] = grid.mesh.points[:, i]
        frame["value"] = grid.value_at(t, grid.mesh.points)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


class SolvePDECommand(ExperimentCommand):
    """Solves the Isaacs equations with the nonlinear Neumann condition by finite differences.

    solve-pde
    """

    SECTION = "pde"

    def run(self, config, spec, fixture, repository, reporter):
        section = config.pde
        params = SchemeParams.from_config(section)
        probe_t = section.probe.t
        probe_x = self.state(spec, section.probe.x)
        report_times = np.linspace(0.0, spec.T, section.report_times)

        grids: dict[Kind, ValueGrid] = {}
        probes, record = [], {}
        errors = []
        for kind in map(Kind, section.kind):
            grid = solve(spec, kind, params.h, params.time_steps, params.cfl)
            grids[kind] = grid
            repository.store_table(f"value_{kind}", value_table(grid, report_times))
            value = float(grid.value_at(probe_t, probe_x)[0])
            exact = fixture.exact(kind, probe_t, probe_x) if fixture is not None else None
            row = {"kind": kind.value, "t": probe_t}
            row.update({f"x{i}": float(c) for i, c in enumerate(probe_x)})
            row.update({"value": value, "exact": np.nan, "error": np.nan})
            if exact is not None:
                row["exact"] = float(exact[0])
                row["error"] = abs(value - row["exact"])
                errors.append(row["error"])
            probes.append(row)
            record[kind.value] = {"grid": grid.header()}

            if section.comparison_shift is not None:
                upper = solve(shifted(spec, terminal=section.comparison_shift), kind, params.h,
                              len(grid.times) - 1, params.cfl, mesh=grid.mesh)
                comparison = comparison_check(grid, upper)
                reporter.verdict(f"comparison-{kind}", comparison.passed,
                                 [f"max excess {comparison.max_difference:.3e} at {comparison.witness}"])
            if section.monotonicity_probes > 0:
                probe = monotonicity_probe(spec, kind, params.h, config.seed, section.monotonicity_probes,
                                           cfl=params.cfl)
                reporter.verdict(f"monotone-{kind}", probe.passed, [f"smallest response {probe.min_response:.3e}"])
            if section.residual:
                residual = viscosity_residual(grid, spec)
                record[kind.value]["residual"] = residual.summary()

        repository.store_table("probe", pd.DataFrame.from_records(probes))
        if Kind.LOWER in grids and Kind.UPPER in grids:
            ordered = comparison_check(grids[Kind.LOWER], grids[Kind.UPPER], same_kind=False)
            reporter.verdict("lower-below-upper", ordered.passed, [f"max excess {ordered.max_difference:.3e}"])
            record["lower_below_upper"] = ordered.max_difference

        first = next(iter(grids.values()))
        metrics = {"h": first.mesh.h, "dt": first.dt, "probe_value": probes[0]["value"]}
        if errors:
            metrics["error"] = max(errors)
            if section.tolerance is not None:
                reporter.verdict("probe-error", metrics["error"] <= section.tolerance,
                                 [f"error {metrics['error']:.4g} above {section.tolerance}"])
        repository.store_record("pde", record)
        return metrics
