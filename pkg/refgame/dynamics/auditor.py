# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Sampling audit of the claimed boundedness, Lipschitz, monotonicity and growth constants.

Every sampled quantity comes from its own counter-based stream, so the first
`k` samples of an audit with `sample_count >= k` are the samples of the audit
with `sample_count == k`; the witnessed constants therefore never shrink when
the sample count grows.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from refgame.dynamics import ProblemSpec
from refgame.log import get_child_logger
from refgame.model.report import ValidationReport, Violation
from refgame.streams import Purpose, generator, open_uniforms

log = get_child_logger("auditor")

DEFAULT_Y_RANGE = 10.0
DEFAULT_Z_RANGE = 10.0
REL_TOL = 1e-9
SMOOTHNESS_NOTE = ("f is only checked for continuity and Lipschitz bounds;"
                   " its C^{1,2,2} smoothness is assumed from the family, not verified")

# stream indices of the sampled quantities
_T, _U, _V, _Y1, _Y2, _Z1, _Z2 = range(7)
_X1_DOMAIN_STREAM = 10
_X2_DOMAIN_STREAM = 12


class _Samples:

    def __init__(self, spec: ProblemSpec, count: int, seed: int, y_range: float, z_range: float):
        d = spec.brownian_dimension

        def uniform(stream: int, shape) -> np.ndarray:
            return open_uniforms(generator(seed, stream, Purpose.AUDIT), shape)

        # the built-in families are autonomous, a single sampled time is enough
        self.t = float(spec.T * uniform(_T, 1)[0])
        self.x1 = spec.domain.sample_closure(seed, count, stream=_X1_DOMAIN_STREAM)
        self.x2 = spec.domain.sample_closure(seed, count, stream=_X2_DOMAIN_STREAM)
        u_index = np.minimum((uniform(_U, count) * len(spec.controls_U)).astype(int), len(spec.controls_U) - 1)
        v_index = np.minimum((uniform(_V, count) * len(spec.controls_V)).astype(int), len(spec.controls_V) - 1)
        self.u = spec.controls_U.points[u_index]
        self.v = spec.controls_V.points[v_index]
        self.y1 = y_range * (2.0 * uniform(_Y1, count) - 1.0)
        self.y2 = y_range * (2.0 * uniform(_Y2, count) - 1.0)
        self.z1 = z_range * (2.0 * uniform(_Z1, (count, d)) - 1.0)
        self.z2 = z_range * (2.0 * uniform(_Z2, (count, d)) - 1.0)

    def witness(self, i: int, *names: str) -> dict:
        return {"t": self.t, **{name: getattr(self, name)[i] for name in ("u", "v") + names}}


def _norm(values: np.ndarray) -> np.ndarray:
    if values.ndim == 1:
        return np.abs(values)
    return np.linalg.norm(values.reshape(len(values), -1), axis=1)


def _quotient(numerator: np.ndarray, denominator: np.ndarray, fill: float = 0.0) -> np.ndarray:
    safe = np.where(denominator > 0, denominator, 1.0)
    return np.where(denominator > 0, numerator / safe, fill)


def _record(report: ValidationReport, kind: str, values: np.ndarray, claimed: float, message: str,
            witness: Callable[[int], dict]) -> None:
    worst = int(np.argmax(values))
    measured = float(values[worst])
    report.measured[kind] = measured
    if measured > claimed + REL_TOL * max(1.0, abs(claimed)):
        report.add(
            Violation(kind=kind,
                      message=message.format(measured=measured, claimed=claimed),
                      witness=witness(worst),
                      measured=measured,
                      claimed=float(claimed)))


def validate_assumptions(spec: ProblemSpec,
                         sample_count: int,
                         seed: int,
                         y_range: float = DEFAULT_Y_RANGE,
                         z_range: float = DEFAULT_Z_RANGE) -> ValidationReport:
    """Audit the claimed constants of `spec` on `sample_count` random sample pairs."""
    if sample_count < 2:
        raise ValueError(f"sample_count must be at least 2, got {sample_count}")
    report = ValidationReport(subject=f"problem:{spec.name}", sample_count=sample_count, seed=seed)
    report.notes.append(SMOOTHNESS_NOTE)
    c = spec.coeffs
    s = _Samples(spec, sample_count, seed, y_range, z_range)
    t0, u, v = s.t, s.u, s.v
    dx = _norm(s.x1 - s.x2)
    dy = s.y1 - s.y2
    dz = _norm(s.z1 - s.z2)

    for name, fn in (("b", c.b), ("sigma", c.sigma)):
        values = _norm(fn(t0, s.x1, u, v))
        _record(report, f"bound:{name}", values, c.bound, f"|{name}| = {{measured:.6g}} exceeds the bound {{claimed:.6g}}",
                lambda i: s.witness(i, "x1"))

    lipschitz_x = {
        "b": lambda x: c.b(t0, x, u, v),
        "sigma": lambda x: c.sigma(t0, x, u, v),
        "g": lambda x: c.g(t0, x, s.y1, s.z1, u, v),
        "f": lambda x: c.f(t0, x, s.y1, u, v),
        "Phi": c.Phi,
    }
    for name, fn in lipschitz_x.items():
        values = _quotient(_norm(fn(s.x1) - fn(s.x2)), dx)
        _record(report, f"lipschitz_x:{name}", values, c.K,
                f"{name} has a Lipschitz quotient {{measured:.6g}} in x above K = {{claimed:.6g}}",
                lambda i: s.witness(i, "x1", "x2", "y1", "z1"))

    g_dy = c.g(t0, s.x1, s.y1, s.z1, u, v) - c.g(t0, s.x1, s.y2, s.z1, u, v)
    _record(report, "monotone_y:g", _quotient(dy * g_dy, dy * dy, -np.inf), c.lambda1,
            "g has a monotonicity quotient {measured:.6g} in y above lambda1 = {claimed:.6g}",
            lambda i: s.witness(i, "x1", "y1", "y2", "z1"))
    f_dy = c.f(t0, s.x1, s.y1, u, v) - c.f(t0, s.x1, s.y2, u, v)
    _record(report, "monotone_y:f", _quotient(dy * f_dy, dy * dy, -np.inf), c.lambda2,
            "f has a monotonicity quotient {measured:.6g} in y above lambda2 = {claimed:.6g}",
            lambda i: s.witness(i, "x1", "y1", "y2"))

    g_dz = c.g(t0, s.x1, s.y1, s.z1, u, v) - c.g(t0, s.x1, s.y1, s.z2, u, v)
    _record(report, "lipschitz_z:g", _quotient(np.abs(g_dz), dz), c.K,
            "g has a Lipschitz quotient {measured:.6g} in z above K = {claimed:.6g}",
            lambda i: s.witness(i, "x1", "y1", "z1", "z2"))

    origin = np.zeros_like(s.x1)
    growth = (np.abs(c.g(t0, origin, s.y1, np.zeros_like(s.z1), u, v)) +
              np.abs(c.f(t0, origin, s.y1, u, v))) / (1.0 + np.abs(s.y1))
    _record(report, "growth", growth, c.K, "|g(t,0,y,0)| + |f(t,0,y)| grows like {measured:.6g}(1+|y|), above K",
            lambda i: s.witness(i, "y1"))

    log.info("audited %s on %d samples: %d violation(s)", spec.name, sample_count, len(report.violations))
    return report
