"""Conditional-gradient outer loop with oracle-selected directions.

Per iteration the solver forms a dual vector from the gradient (plain or
accelerated rule), asks the configured oracle for a support, scales the
restricted dual vector onto the radius sphere, and steps toward it (or
toward the delta-inflated copy under update option II). Step sizes come
from the open-loop 2/(t+2) schedule, backtracking line search, or the
closed-form curvature rule. The returned point is the best iterate seen,
not the last one.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Callable

import numpy as np

from .constraints import DEFAULT_ENUMERATION_CAP, ConstraintModel
from .dmo import (
    DmoParams,
    exact_lmo_support,
    support_to_direction,
    top_g_plus_optimal_visit,
    top_g_plus_visit,
)
from .errors import ConfigError, NumericError
from .objective import LeastSquaresObjective

__all__ = [
    "SolverConfig",
    "IterationRecord",
    "IterationTrace",
    "TRACE_CSV_HEADER",
    "BACKTRACK_FLOOR",
    "compute_z",
    "step",
    "backtracking_eta",
    "demyanov_rubinov_eta",
    "solve",
]

TRACE_CSV_HEADER = "t,eta,objective,captured_norm,support_size,shrinks,wall_ns"

# Backtracking gives up shrinking below this step size and flags the record.
BACKTRACK_FLOOR = 1e-12


@dataclass
class SolverConfig:
    """All knobs of the conditional-gradient loop.

    variant:    "fw" (dual vector is the negated gradient) or "accfw"
                (pull-to-origin rule needing the curvature constant).
    option:     update rule "I" (plain convex step) or "II" (direction
                inflated by 1/delta; iterates may leave the ball).
    step_rule:  "open_loop", "backtracking", or "demyanov_rubinov".
    dmo:        "exact", "topg", or "topg_optimal".
    delta:      oracle quality factor in (0, 1]; None resolves to 1 for the
                exact oracle and sqrt(1/ceil(s/g)) for the growing oracles.
    """

    variant: str = "fw"
    option: str = "I"
    step_rule: str = "open_loop"
    beta: float = 0.5
    eta_init: float = 1.0
    lipschitz: float | None = None
    delta: float | None = None
    max_iters: int = 500
    rel_tol: float = 1e-6
    dmo: str = "exact"
    theta: int = 5
    dmo_seed: int | None = None
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP

    def resolved_delta(self, model: ConstraintModel) -> float:
        if self.delta is not None:
            return self.delta
        if self.dmo in ("topg", "topg_optimal"):
            if model.g is None:
                raise ConfigError(f"dmo {self.dmo!r} requires a graph model")
            return math.sqrt(1.0 / math.ceil(model.s / model.g))
        return 1.0

    def validate(self, model: ConstraintModel) -> None:
        if self.variant not in ("fw", "accfw"):
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.option not in ("I", "II"):
            raise ConfigError(f"unknown update option {self.option!r}")
        if self.step_rule not in ("open_loop", "backtracking", "demyanov_rubinov"):
            raise ConfigError(f"unknown step rule {self.step_rule!r}")
        if self.dmo not in ("exact", "topg", "topg_optimal"):
            raise ConfigError(f"unknown dmo variant {self.dmo!r}")
        if not (0.0 < self.beta < 1.0):
            raise ConfigError(f"need beta in (0,1), got {self.beta}")
        if not (0.0 < self.eta_init <= 1.0):
            raise ConfigError(f"need eta_init in (0,1], got {self.eta_init}")
        if self.max_iters < 1:
            raise ConfigError(f"need max_iters >= 1, got {self.max_iters}")
        if self.rel_tol < 0:
            raise ConfigError(f"need rel_tol >= 0, got {self.rel_tol}")
        if self.theta < 1:
            raise ConfigError(f"need theta >= 1, got {self.theta}")
        if self.dmo in ("topg", "topg_optimal") and model.graph is None:
            raise ConfigError(f"dmo {self.dmo!r} requires a graph model")
        delta = self.resolved_delta(model)
        if not (0.0 < delta <= 1.0):
            raise ConfigError(f"need delta in (0,1], got {delta}")
        if self.variant == "accfw":
            # The accelerated dual vector needs the step size before the
            # direction exists, so only the scheduled rule is well defined.
            if self.step_rule != "open_loop":
                raise ConfigError(
                    "accfw requires the open_loop step rule: adaptive rules "
                    "would need the step size before the direction exists"
                )
            if self.lipschitz is None or self.lipschitz <= 0:
                raise ConfigError("accfw requires lipschitz > 0")
        if self.step_rule == "demyanov_rubinov" and (
            self.lipschitz is None or self.lipschitz <= 0
        ):
            raise ConfigError("demyanov_rubinov requires lipschitz > 0")


@dataclass
class IterationRecord:
    """One row of the trace.

    Step rows carry the state at iteration t and the step taken from it;
    the final row carries the terminal iterate with eta = 0 and no oracle
    stats. ``x_norm`` and ``floored`` are in-memory extras, not serialized
    to CSV.
    """

    t: int
    eta: float
    objective: float
    captured_norm: float
    support_size: int
    shrinks: int
    wall_ns: int
    x_norm: float = 0.0
    floored: bool = False

    def csv_row(self) -> str:
        return (
            f"{self.t},{self.eta!r},{self.objective!r},{self.captured_norm!r},"
            f"{self.support_size},{self.shrinks},{self.wall_ns}"
        )


@dataclass
class IterationTrace:
    records: list[IterationRecord] = field(default_factory=list)
    best_t: int = 0
    best_objective: float = math.inf
    termination: str = "max_iters"

    def to_csv(self, target: str | Path | IO[str]) -> None:
        lines = [TRACE_CSV_HEADER + "\n"]
        lines.extend(r.csv_row() + "\n" for r in self.records)
        if isinstance(target, (str, Path)):
            with open(target, "w", encoding="utf-8") as fh:
                fh.writelines(lines)
        else:
            target.writelines(lines)

    def summary_dict(self, config_echo: dict | None = None) -> dict:
        return {
            "best_t": self.best_t,
            "best_objective": self.best_objective,
            "termination": self.termination,
            "config": config_echo or {},
        }


def compute_z(
    variant: str,
    x: np.ndarray,
    grad: np.ndarray,
    lipschitz: float | None = None,
    eta: float | None = None,
) -> np.ndarray:
    """Dual vector handed to the oracle: -grad, or the accelerated pull."""
    if variant == "fw":
        return -grad
    if variant == "accfw":
        if lipschitz is None or lipschitz <= 0:
            raise ConfigError("accfw requires lipschitz > 0")
        if eta is None or eta <= 0:
            raise ConfigError("accfw requires a positive step size")
        return -(x - grad / (lipschitz * eta))
    raise ConfigError(f"unknown variant {variant!r}")


def step(
    x: np.ndarray,
    v_tilde: np.ndarray,
    eta: float,
    option: str = "I",
    delta: float = 1.0,
) -> np.ndarray:
    """One update: option I moves toward v, option II toward v / delta."""
    if option == "I":
        return x + eta * (v_tilde - x)
    if option == "II":
        return x + eta * (v_tilde / delta - x)
    raise ConfigError(f"unknown update option {option!r}")


def backtracking_eta(
    objective,
    x: np.ndarray,
    v: np.ndarray,
    eta_prev: float,
    beta: float,
) -> tuple[float, int, bool]:
    """Shrink the step until the sufficient-decrease test accepts it.

    Accepts eta once f(x - eta*(x - v)) <= f(x) - 0.5*eta*||x - v||^2,
    multiplying by beta otherwise. Returns (eta, shrink count, floored);
    ``floored`` marks the documented 1e-12 fallback when no step satisfies
    the test. ``objective`` only needs an ``evaluate(x) -> float`` method.
    """
    direction = x - v
    sq = float(direction @ direction)
    fx = objective.evaluate(x)
    eta = eta_prev
    shrinks = 0
    while True:
        probe = objective.evaluate(x - eta * direction)
        if not math.isfinite(probe):
            raise NumericError(f"non-finite objective probing step size {eta}")
        if probe <= fx - 0.5 * eta * sq:
            return eta, shrinks, False
        eta *= beta
        shrinks += 1
        if eta < BACKTRACK_FLOOR:
            return BACKTRACK_FLOOR, shrinks, True


def demyanov_rubinov_eta(
    grad: np.ndarray,
    v_tilde: np.ndarray,
    x: np.ndarray,
    lipschitz: float,
) -> float:
    """Closed-form step min{<-grad, v - x> / (L ||v - x||^2), 1}, clamped to [0, 1]."""
    if lipschitz <= 0:
        raise ConfigError(f"need lipschitz > 0, got {lipschitz}")
    disp = v_tilde - x
    sq = float(disp @ disp)
    if sq == 0.0:
        return 0.0
    val = float(-grad @ disp) / (lipschitz * sq)
    return min(max(val, 0.0), 1.0)


def _call_dmo(
    config: SolverConfig,
    model: ConstraintModel,
    params: DmoParams | None,
    rng: np.random.Generator | None,
    z: np.ndarray,
):
    """Returns (support, captured_norm) for the configured oracle."""
    if config.dmo == "exact":
        sup = exact_lmo_support(model, z, cap=config.enumeration_cap)
        return sup, float(np.linalg.norm(z[list(sup)])) if sup else 0.0
    if config.dmo == "topg":
        res = top_g_plus_visit(model.graph, params, z)
    else:
        res = top_g_plus_optimal_visit(model.graph, params, z, rng=rng)
    return res.support, res.captured_norm


def solve(
    config: SolverConfig,
    objective: LeastSquaresObjective,
    model: ConstraintModel,
    x0: np.ndarray | None = None,
    callback: Callable[[dict], None] | None = None,
) -> tuple[np.ndarray, float, IterationTrace]:
    """Run the conditional-gradient loop and return the best iterate.

    Stops at max_iters, when the relative objective change falls to
    rel_tol (immediately if the objective hits exactly zero), or when the
    oracle support captures no mass ("stationary"). ``callback``, when
    given, is invoked once per step with a dict holding t, x, x_next, v,
    eta, support, and shrinks; handy for audits.

    The trace holds one row per step plus a final row for the terminal
    iterate (eta = 0, no oracle stats), so the reported best objective is
    always the minimum over recorded rows.
    """
    config.validate(model)
    if objective.dim != model.dim:
        raise ConfigError(
            f"objective dimension {objective.dim} does not match model {model.dim}"
        )
    delta = config.resolved_delta(model)
    params = None
    rng = None
    if config.dmo in ("topg", "topg_optimal"):
        params = DmoParams(
            g=model.g, s=model.s, theta=config.theta, seed=config.dmo_seed
        )
        if config.dmo == "topg_optimal":
            # One generator owned by this run; repeated oracle calls advance it.
            rng = np.random.default_rng(config.dmo_seed)

    x = np.zeros(model.dim) if x0 is None else np.asarray(x0, dtype=float).copy()
    f_x = objective.evaluate(x)
    if not math.isfinite(f_x):
        raise NumericError("non-finite objective at the starting point")

    trace = IterationTrace()
    best_f, best_x, best_t = f_x, x.copy(), 0
    eta_prev = config.eta_init
    termination = "max_iters"

    for t in range(config.max_iters):
        if f_x == 0.0:
            termination = "converged"
            break
        t0 = time.perf_counter_ns()
        grad = objective.gradient(x)
        eta_sched = 2.0 / (t + 2.0)
        z = compute_z(config.variant, x, grad, config.lipschitz, eta_sched)
        support, captured = _call_dmo(config, model, params, rng, z)
        if captured == 0.0:
            termination = "stationary"
            break
        v = support_to_direction(z, support, model.radius)
        target = v if config.option == "I" else v / delta
        shrinks = 0
        floored = False
        if config.step_rule == "open_loop":
            eta = eta_sched
        elif config.step_rule == "backtracking":
            eta, shrinks, floored = backtracking_eta(
                objective, x, target, eta_prev, config.beta
            )
            eta_prev = eta
        else:
            eta = demyanov_rubinov_eta(grad, target, x, config.lipschitz)
        x_next = step(x, v, eta, config.option, delta)
        f_next = objective.evaluate(x_next)
        if not math.isfinite(f_next):
            raise NumericError(f"non-finite objective at iteration {t}")
        wall = time.perf_counter_ns() - t0
        trace.records.append(
            IterationRecord(
                t=t,
                eta=float(eta),
                objective=float(f_x),
                captured_norm=float(captured),
                support_size=len(support),
                shrinks=shrinks,
                wall_ns=wall,
                x_norm=float(np.linalg.norm(x)),
                floored=floored,
            )
        )
        if callback is not None:
            callback(
                {
                    "t": t,
                    "x": x,
                    "x_next": x_next,
                    "v": target,
                    "eta": eta,
                    "support": support,
                    "shrinks": shrinks,
                    "floored": floored,
                }
            )
        if f_next < best_f:
            best_f, best_x, best_t = f_next, x_next.copy(), t + 1
        if abs(f_next - f_x) / abs(f_x) <= config.rel_tol:
            x, f_x = x_next, f_next
            termination = "converged"
            break
        x, f_x = x_next, f_next

    terminal_t = len(trace.records)
    trace.records.append(
        IterationRecord(
            t=terminal_t,
            eta=0.0,
            objective=float(f_x),
            captured_norm=0.0,
            support_size=0,
            shrinks=0,
            wall_ns=0,
            x_norm=float(np.linalg.norm(x)),
        )
    )
    trace.best_t = best_t
    trace.best_objective = float(best_f)
    trace.termination = termination
    return best_x, float(best_f), trace
