# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Backward solvers for generalized BSDEs driven by dt and the local time d(eta)."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from refgame._compat import StrEnum

import numpy as np

from refgame.dynamics import ProblemSpec
from refgame.dynamics.policy import Policy
from refgame.gbsde.regression import Estimator, RegressionSpec, fit
from refgame.log import get_child_logger
from refgame.model.ensemble import PathEnsemble
from refgame.model.solution import BackwardSolution

log = get_child_logger("gbsde")


class SchemeMode(StrEnum):
    AUTO = "auto"
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"


@dataclass(slots=True, frozen=True)
class SchemeOptions:
    mode: SchemeMode = SchemeMode.AUTO
    max_iterations: int = 20
    tol: float = 1e-10
    stiffness: float = 0.1
    """Threshold of lambda1 * dt and lambda2 * max d(eta) above which `AUTO` iterates."""

    def implicit(self, lambda1: float, lambda2: float, max_dt: float, max_d_eta: float) -> bool:
        match self.mode:
            case SchemeMode.EXPLICIT:
                return False
            case SchemeMode.IMPLICIT:
                return True
        return lambda1 * max_dt > self.stiffness or lambda2 * max_d_eta > self.stiffness

    @classmethod
    def from_config(cls, config) -> SchemeOptions:
        return cls(SchemeMode(config.get("mode", SchemeMode.AUTO)), config.get("max_iterations", 20),
                   config.get("tol", 1e-10), config.get("stiffness", 0.1))


CONFIG_SCHEMA: dict = {
    "mode": {
        "type": "string",
        "allowed": [m.value for m in SchemeMode],
        "default": SchemeMode.AUTO.value,
        "meta": {
            "description": "Explicit step, fixed-point iteration, or iteration only when stiff"
        },
    },
    "max_iterations": {
        "type": "integer",
        "min": 1,
        "default": 20,
    },
    "tol": {
        "type": "float",
        "min": 0.0,
        "default": 1e-10,
    },
    "stiffness": {
        "type": "float",
        "min": 0.0,
        "default": 0.1,
    },
}


Driver = Callable[[int, np.ndarray, np.ndarray, np.ndarray, Estimator], np.ndarray]
"""driver(k, active, y, z, expect) -> increment of step k for the active paths."""


def backward_sweep(times: np.ndarray,
                   features: np.ndarray,
                   dB: np.ndarray,  # pylint: disable=invalid-name
                   variance: np.ndarray,
                   terminal: np.ndarray,
                   driver: Driver,
                   reg: RegressionSpec,
                   implicit: bool = False,
                   options: SchemeOptions = SchemeOptions(),
                   stop: np.ndarray | None = None) -> BackwardSolution:
    """Backward Euler recursion Y_k = Ê_k[Y_{k+1}] + driver(k, Y_k, Z_k).

    Z_k = Ê_k[(Y_{k+1} - Ê_k[Y_{k+1}]) dB_k] / variance_k. Path i stops at step
    stop[i] (default: the last step); from there on it holds its terminal value.
    """
    count, steps = dB.shape[0], dB.shape[1]
    stop = np.full(count, steps, dtype=int) if stop is None else np.asarray(stop, dtype=int)
    Y = np.empty((count, steps + 1))  # pylint: disable=invalid-name
    Y[:] = terminal[:, None]
    Z = np.zeros((count, steps, dB.shape[2]))  # pylint: disable=invalid-name
    condition = np.ones(steps)
    iterations = np.zeros(steps, dtype=int)
    samples = np.asarray(terminal, dtype=float)

    for k in range(steps - 1, -1, -1):
        active = np.flatnonzero(k < stop)
        if active.size == 0:
            continue
        expect = fit(features[active, k], reg)
        condition[k] = expect.condition
        following = Y[active, k + 1]
        predicted = expect(following)
        z = expect((following - predicted)[:, None] * dB[active, k]) / variance[k]
        y = predicted + driver(k, active, predicted, z, expect)
        iterations[k] = 1
        if implicit:
            for iteration in range(2, options.max_iterations + 1):
                update = predicted + driver(k, active, y, z, expect)
                change = float(np.max(np.abs(update - y)))
                y = update
                iterations[k] = iteration
                if change < options.tol:
                    break
            else:
                log.warning("step %d: fixed-point iteration stopped after %d sweeps", k, options.max_iterations)
        Y[active, k] = y
        Z[active, k] = z
        if k == 0:
            samples = following + driver(k, active, y, z, expect)

    stderr = float(samples.std(ddof=1) / np.sqrt(len(samples))) if len(samples) > 1 else 0.0
    return BackwardSolution(times=times, Y=Y, Z=Z, condition=condition, stderr=stderr, iterations=iterations)


def controls_along(ensemble: PathEnsemble, u_policy: Policy,
                   v_policy: Policy) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Policy outputs at every (t_k, X_k), k < M."""
    u = [u_policy(ensemble.times[k], ensemble.X[:, k]) for k in range(ensemble.steps)]
    v = [v_policy(ensemble.times[k], ensemble.X[:, k]) for k in range(ensemble.steps)]
    return u, v


def gbsde_driver(spec: ProblemSpec, ensemble: PathEnsemble, u: list[np.ndarray], v: list[np.ndarray]) -> Driver:
    """g dt + f Ê_k[d(eta)_k] along the ensemble."""
    c = spec.coeffs
    dt = ensemble.dt
    d_eta = ensemble.d_eta

    def driver(k, active, y, z, expect):
        t, x = ensemble.times[k], ensemble.X[active, k]
        increment = c.g(t, x, y, z, u[k][active], v[k][active]) * dt[k]
        local = d_eta[active, k]
        if np.any(local):
            increment = increment + c.f(t, x, y, u[k][active], v[k][active]) * expect(local)
        return increment

    return driver


def solve_on_ensemble(ensemble: PathEnsemble,
                      spec: ProblemSpec,
                      u_policy: Policy,
                      v_policy: Policy,
                      terminal: Callable[[np.ndarray], np.ndarray] | None,
                      reg: RegressionSpec = RegressionSpec(),
                      options: SchemeOptions = SchemeOptions(),
                      stop: np.ndarray | None = None,
                      terminal_values: np.ndarray | None = None) -> BackwardSolution:
    """Solve the controlled GBSDE backward on `ensemble`.

    The terminal value is `terminal` evaluated at the stopped states, or the
    given `terminal_values`.
    """
    count, steps = ensemble.path_count, ensemble.steps
    stop_index = np.full(count, steps, dtype=int) if stop is None else np.asarray(stop, dtype=int)
    if terminal_values is None:
        if terminal is None:
            raise ValueError("either a terminal function or terminal values are needed")
        terminal_values = terminal(ensemble.X[np.arange(count), stop_index])
    terminal_values = np.asarray(terminal_values, dtype=float)
    u, v = controls_along(ensemble, u_policy, v_policy)
    max_d_eta = float(ensemble.d_eta.max()) if ensemble.d_eta.size else 0.0
    implicit = options.implicit(spec.coeffs.lambda1, spec.coeffs.lambda2, float(ensemble.dt.max()), max_d_eta)
    solution = backward_sweep(ensemble.times,
                              ensemble.X,
                              ensemble.dB,
                              ensemble.dt,
                              terminal_values,
                              gbsde_driver(spec, ensemble, u, v),
                              reg,
                              implicit=implicit,
                              options=options,
                              stop=stop_index)
    log.debug("solved on %d paths x %d steps: Y_t = %.6g +- %.2g%s", count, steps, solution.value, solution.stderr,
              " (implicit)" if implicit else "")
    return solution
