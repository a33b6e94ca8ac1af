"""Projected-gradient-descent baselines.

Both variants take a plain gradient step and then project onto the
constraint set of some feasible support: the random baseline draws the
support from the model's construction distribution, the exhaustive one
scans every feasible support and keeps the projection with the lowest
objective. Iterates are therefore always feasible from t = 1 on.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .constraints import (
    DEFAULT_ENUMERATION_CAP,
    ConstraintModel,
    project_to_support_ball,
    random_feasible_support,
)
from .errors import ConfigError, NumericError
from .objective import LeastSquaresObjective
from .solver import IterationRecord, IterationTrace

__all__ = ["PgdConfig", "random_pgd", "best_pgd"]


@dataclass
class PgdConfig:
    """Step rule and loop knobs for the PGD baselines.

    ``step_size`` is the fixed gradient step; when None it resolves to
    1 / lipschitz, the standard stable choice.
    """

    step_size: float | None = None
    lipschitz: float | None = None
    max_iters: int = 500
    rel_tol: float = 1e-6
    seed: int | None = None
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP

    def resolved_step(self) -> float:
        if self.step_size is not None:
            if self.step_size <= 0:
                raise ConfigError(f"need step_size > 0, got {self.step_size}")
            return self.step_size
        if self.lipschitz is None or self.lipschitz <= 0:
            raise ConfigError("need step_size or lipschitz > 0")
        return 1.0 / self.lipschitz

    def validate(self) -> None:
        self.resolved_step()
        if self.max_iters < 1:
            raise ConfigError(f"need max_iters >= 1, got {self.max_iters}")
        if self.rel_tol < 0:
            raise ConfigError(f"need rel_tol >= 0, got {self.rel_tol}")


def _pgd_loop(
    objective: LeastSquaresObjective,
    model: ConstraintModel,
    config: PgdConfig,
    x0: np.ndarray | None,
    callback,
    pick: Callable[[np.ndarray], tuple[tuple[int, ...], np.ndarray]],
) -> tuple[np.ndarray, float, IterationTrace]:
    config.validate()
    if objective.dim != model.dim:
        raise ConfigError(
            f"objective dimension {objective.dim} does not match model {model.dim}"
        )
    alpha = config.resolved_step()
    x = np.zeros(model.dim) if x0 is None else np.asarray(x0, dtype=float).copy()
    f_x = objective.evaluate(x)
    if not math.isfinite(f_x):
        raise NumericError("non-finite objective at the starting point")

    trace = IterationTrace()
    best_f, best_x, best_t = f_x, x.copy(), 0
    termination = "max_iters"
    for t in range(config.max_iters):
        if f_x == 0.0:
            termination = "converged"
            break
        t0 = time.perf_counter_ns()
        shifted = x - alpha * objective.gradient(x)
        support, x_next = pick(shifted)
        f_next = objective.evaluate(x_next)
        if not math.isfinite(f_next):
            raise NumericError(f"non-finite objective at iteration {t}")
        captured = float(np.linalg.norm(shifted[list(support)])) if support else 0.0
        wall = time.perf_counter_ns() - t0
        trace.records.append(
            IterationRecord(
                t=t,
                eta=float(alpha),
                objective=float(f_x),
                captured_norm=captured,
                support_size=len(support),
                shrinks=0,
                wall_ns=wall,
                x_norm=float(np.linalg.norm(x)),
            )
        )
        if callback is not None:
            callback({"t": t, "x": x, "x_next": x_next, "support": support, "eta": alpha})
        if f_next < best_f:
            best_f, best_x, best_t = f_next, x_next.copy(), t + 1
        if abs(f_next - f_x) / abs(f_x) <= config.rel_tol:
            x, f_x = x_next, f_next
            termination = "converged"
            break
        x, f_x = x_next, f_next

    trace.records.append(
        IterationRecord(
            t=len(trace.records),
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


def random_pgd(
    objective: LeastSquaresObjective,
    model: ConstraintModel,
    config: PgdConfig,
    x0: np.ndarray | None = None,
    callback=None,
) -> tuple[np.ndarray, float, IterationTrace]:
    """PGD with a fresh random feasible support drawn every iteration."""
    rng = np.random.default_rng(config.seed)

    def pick(shifted: np.ndarray):
        support = random_feasible_support(model, rng)
        return support, project_to_support_ball(shifted, support, model.radius)

    return _pgd_loop(objective, model, config, x0, callback, pick)


def best_pgd(
    objective: LeastSquaresObjective,
    model: ConstraintModel,
    config: PgdConfig,
    x0: np.ndarray | None = None,
    callback=None,
) -> tuple[np.ndarray, float, IterationTrace]:
    """PGD projecting onto the best feasible support each iteration.

    Scans every feasible support (so the model must be enumerable under
    the cap) and keeps the projection with the lowest objective; ties keep
    the lexicographically first support.
    """
    supports = list(model.enumerate_supports(cap=config.enumeration_cap))

    def pick(shifted: np.ndarray):
        best = None
        for sup in supports:
            cand = project_to_support_ball(shifted, sup, model.radius)
            fc = objective.evaluate(cand)
            if best is None or fc < best[0]:
                best = (fc, sup, cand)
        return best[1], best[2]

    return _pgd_loop(objective, model, config, x0, callback, pick)
