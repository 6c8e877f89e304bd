# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd
from clikit.api.args.format import Option

from refgame.cli.command import EXIT_ERROR, RefgameCommand
from refgame.config import default_out_dir
from refgame.errors import RefgameError
from refgame.log import get_child_logger
from refgame.repository.run_workdir import RunRepositoryWorkdir

log = get_child_logger("report")

COLUMNS = ["fixture", "command", "config_hash", "seed", "run", "h", "dt", "error", "slope_h", "slope_dt"]


def _slope(resolution: pd.Series, error: pd.Series) -> float:
    """Least-squares slope of log(error) over log(resolution); NaN without two distinct resolutions."""
    usable = resolution.notna() & error.notna() & (resolution > 0) & (error > 0)
    if resolution[usable].nunique() < 2:
        return np.nan
    return float(np.polyfit(np.log(resolution[usable].to_numpy()), np.log(error[usable].to_numpy()), 1)[0])


def convergence_table(run_dirs: Sequence[Path]) -> pd.DataFrame:
    """One row per run, with the log-log slopes of its (fixture, command) group."""
    rows = []
    for run_dir in run_dirs:
        manifest = RunRepositoryWorkdir(run_dir).load_manifest()
        rows.append({
            "fixture": manifest.fixture,
            "command": manifest.command,
            "config_hash": manifest.config_hash,
            "seed": manifest.seed,
            "run": str(run_dir),
            "h": manifest.metrics.get("h", np.nan),
            "dt": manifest.metrics.get("dt", np.nan),
            "error": manifest.metrics.get("error", np.nan),
        })
    table = pd.DataFrame.from_records(rows, columns=COLUMNS[:-2])
    table = table.astype({"h": float, "dt": float, "error": float})
    table = table.sort_values(["fixture", "command", "h", "dt", "run"], ignore_index=True, kind="stable")
    table["slope_h"] = np.nan
    table["slope_dt"] = np.nan
    for _, group in table.groupby(["fixture", "command"], sort=True):
        table.loc[group.index, "slope_h"] = _slope(group["h"], group["error"])
        table.loc[group.index, "slope_dt"] = _slope(group["dt"], group["error"])
    return table[COLUMNS]


class ReportCommand(RefgameCommand):
    """Joins the manifests of runs into a convergence table.

    report
        {dirs* : Run directories holding a manifest}
    """

    def __init__(self):
        super().__init__()
        self._config.add_option(
            long_name="out",
            flags=Option.REQUIRED_VALUE,
            description="Directory of the convergence table (default: the default output directory)",
        )

    def handle(self):
        out_dir = Path(self.option("out")) if self.option("out") else default_out_dir()
        try:
            table = convergence_table([Path(d) for d in self.argument("dirs")])
            path = RunRepositoryWorkdir(out_dir).store_table("convergence", table)
        except RefgameError as err:
            log.error("%s", err)
            self.line_error(str(err), style="error")
            raise SystemExit(EXIT_ERROR) from err
        for row in table.itertuples():
            self.line(f"{row.fixture:<18} {row.command:<14} h={row.h:<10.4g} dt={row.dt:<10.4g} error={row.error:.4g}")
        log.info("convergence table of %d run(s) written to '%s'", len(table), path)
