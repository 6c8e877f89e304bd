# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

from dataclasses import asdict

import pandas as pd

from refgame.cli.command import ExperimentCommand
from refgame.dynamics.auditor import validate_assumptions
from refgame.geometry.validation import validate_domain
from refgame.isaacs.hamiltonian import isaacs_gap
from refgame.log import get_child_logger
from refgame.serializer.util import canonical_json

log = get_child_logger("validate")

VIOLATION_COLUMNS = ["subject", "kind", "message", "measured", "claimed", "witness"]


class ValidateCommand(ExperimentCommand):
    """Audits the domain and the coefficient assumptions of a problem on random samples.

    validate
    """

    SECTION = "validate"

    def run(self, config, spec, fixture, repository, reporter):
        section = config.validate
        reports = [
            validate_domain(spec.domain, section.samples, config.seed),
            validate_assumptions(spec, section.samples, config.seed, section.y_range, section.z_range),
        ]
        gap = isaacs_gap(spec, section.gap_samples, config.seed)

        rows = []
        for report in reports:
            for record in report.records():
                record["subject"] = report.subject
                record["witness"] = canonical_json(record["witness"]).decode()
                rows.append(record)
        repository.store_table("violations", pd.DataFrame(rows, columns=VIOLATION_COLUMNS))
        repository.store_record("validation", {
            "reports": [report.header() for report in reports],
            "isaacs_gap": asdict(gap),
        })

        for report in reports:
            reporter.verdict(report.subject, report.passed, [v.message for v in report.violations[:3]])
        reporter.verdict("isaacs-duality", gap.duality_violations == 0,
                         [f"{gap.duality_violations} sample(s) with lower above upper Hamiltonian"])
        log.info("validated %s: %d violation(s), Isaacs gap %.3g", spec.name, len(rows), gap.gap)
        return {"violations": len(rows), "isaacs_gap": gap.gap}
