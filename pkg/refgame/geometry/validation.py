# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later

from __future__ import annotations

import numpy as np

from refgame.geometry import Domain
from refgame.log import get_child_logger
from refgame.model.report import ValidationReport, Violation

log = get_child_logger("geometry")

GRAD_NORM_TOL = 1e-6
INEQUALITY_TOL = 1e-9
BOUND_TOL = 1e-9


def validate_domain(domain: Domain, sample_count: int, seed: int) -> ValidationReport:
    """Check the normalization, the domain inequality, 0 in O and the stored bounds at samples."""
    if sample_count < 1:
        raise ValueError(f"sample_count must be at least 1, got {sample_count}")
    report = ValidationReport(subject=f"domain:{domain.name}", sample_count=sample_count, seed=seed)
    boundary = domain.sample_boundary(seed, sample_count, stream=0)
    closure = domain.sample_closure(seed, sample_count, stream=2)

    _check_normalization(domain, boundary, report)
    _check_inequality(domain, boundary, closure, report)
    _check_origin(domain, report)
    _check_bounds(domain, np.concatenate([boundary, closure]), report)
    log.info("validated %s on %d samples: %d violation(s)", domain.name, sample_count, len(report.violations))
    return report


def _check_normalization(domain: Domain, boundary: np.ndarray, report: ValidationReport) -> None:
    norms = np.linalg.norm(domain.grad_phi(boundary), axis=1)
    worst = int(np.argmax(np.abs(norms - 1.0)))
    report.measured["grad_norm_deviation"] = float(abs(norms[worst] - 1.0))
    if abs(norms[worst] - 1.0) > GRAD_NORM_TOL:
        report.add(
            Violation(kind="grad_norm",
                      message=f"|grad phi| = {norms[worst]:.6g} != 1 on the boundary",
                      witness={"x": boundary[worst]},
                      measured=float(norms[worst]),
                      claimed=1.0))


def _check_inequality(domain: Domain, boundary: np.ndarray, closure: np.ndarray, report: ValidationReport) -> None:
    # pair every boundary point with a closure point and with another boundary point
    others = np.concatenate([closure, np.roll(boundary, 1, axis=0)])
    base = np.concatenate([boundary, boundary])
    diff = others - base
    inner = 2.0 * np.sum(diff * domain.grad_phi(base), axis=1)
    dist2 = np.sum(diff * diff, axis=1)
    values = inner + domain.c0 * dist2
    needed = np.where(dist2 > 0, -inner / np.where(dist2 > 0, dist2, 1.0), 0.0)
    report.measured["c0_needed"] = float(max(needed.max(), 0.0))
    worst = int(np.argmin(values))
    if values[worst] < -INEQUALITY_TOL:
        report.add(
            Violation(kind="domain_inequality",
                      message=f"2<x'-x, grad phi(x)> + C0|x-x'|^2 = {values[worst]:.6g} < 0",
                      witness={
                          "x": base[worst],
                          "x_prime": others[worst]
                      },
                      measured=float(needed[worst]),
                      claimed=domain.c0))


def _check_origin(domain: Domain, report: ValidationReport) -> None:
    value = float(domain.phi(np.zeros((1, domain.dimension)))[0])
    if value <= 0:
        report.add(
            Violation(kind="origin",
                      message=f"phi(0) = {value:.6g} is not positive",
                      witness={"x": np.zeros(domain.dimension)},
                      measured=value,
                      claimed=0.0))


def _check_bounds(domain: Domain, points: np.ndarray, report: ValidationReport) -> None:
    claimed = domain.bounds
    measured = {
        "phi": np.abs(domain.phi(points)),
        "grad": np.linalg.norm(domain.grad_phi(points), axis=1),
        "hess": np.linalg.norm(domain.hess_phi(points), axis=(1, 2)),
    }
    for name, values in measured.items():
        worst = int(np.argmax(values))
        bound = getattr(claimed, name)
        report.measured[f"bound_{name}"] = float(values[worst])
        if values[worst] > bound + BOUND_TOL:
            report.add(
                Violation(kind=f"bound:{name}",
                          message=f"sup |{name}| = {values[worst]:.6g} exceeds the stored bound {bound:.6g}",
                          witness={"x": points[worst]},
                          measured=float(values[worst]),
                          claimed=float(bound)))
