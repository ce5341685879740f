"""Bounded black-box optimizers behind one budgeted interface.

Every algorithm evaluates the objective only through a counting wrapper
that records each call and cuts the run off at the budget, so the
number of objective calls can never exceed the budget and the reported
optimum is the argmin over everything evaluated. All algorithms start
from the supplied point (their first evaluation is the start point, so
a budget of 1 degenerates to scoring it) and draw randomness from one
seeded generator; the simplex search draws nothing and is fully
deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from ..model import ConfigError
from . import byo, cors, ga, mads, nmsa, sa, spsa
from .common import (
    BudgetExhausted,
    CountingObjective,
    EvalRecord,
    EvalTrace,
    box_violation,
    check_box,
    from_unit,
    latin_hypercube,
    to_unit,
)

_MODULES = {
    "ga": ga,
    "sa": sa,
    "nmsa": nmsa,
    "mads": mads,
    "spsa": spsa,
    "byo": byo,
    "cors": cors,
}

ALGORITHMS = tuple(_MODULES)

DETERMINISTIC_ALGORITHMS = ("nmsa",)


@dataclass(frozen=True)
class OptimizerConfig:
    algorithm: str
    budget: int = 100
    seed: int = 0
    hyperparams: Dict[str, object] = field(default_factory=dict)

    def resolved_hyperparams(self) -> Dict[str, object]:
        if self.algorithm not in _MODULES:
            raise ConfigError(
                f"unknown algorithm {self.algorithm!r}; expected one of {', '.join(ALGORITHMS)}"
            )
        merged = dict(_MODULES[self.algorithm].DEFAULTS)
        unknown = set(self.hyperparams) - set(merged)
        if unknown:
            raise ConfigError(f"unknown hyperparameters for {self.algorithm}: {sorted(unknown)}")
        merged.update(self.hyperparams)
        return merged


@dataclass
class OptimizeResult:
    algorithm: str
    best_theta: np.ndarray
    best_value: float
    n_evals: int
    trace: EvalTrace


def optimize(
    objective: Callable[[np.ndarray], float],
    lower: np.ndarray,
    upper: np.ndarray,
    theta_ini: np.ndarray,
    config: OptimizerConfig,
) -> OptimizeResult:
    """Run one optimizer until its evaluation budget is spent."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    theta_ini = np.asarray(theta_ini, dtype=float)
    check_box(lower, upper, theta_ini)
    hp = config.resolved_hyperparams()

    trace = EvalTrace(algorithm=config.algorithm, seed=config.seed, hyperparams=hp)
    tally = CountingObjective(objective, config.budget, trace)
    rng = np.random.default_rng(config.seed)
    try:
        _MODULES[config.algorithm].run(tally, lower, upper, theta_ini, rng, hp)
    except BudgetExhausted:
        pass
    if not trace.records:
        raise ConfigError(f"{config.algorithm} terminated without evaluating any point")
    best = trace.best()
    return OptimizeResult(
        algorithm=config.algorithm,
        best_theta=best.theta.copy(),
        best_value=best.value,
        n_evals=len(trace),
        trace=trace,
    )


__all__ = [
    "ALGORITHMS",
    "DETERMINISTIC_ALGORITHMS",
    "BudgetExhausted",
    "CountingObjective",
    "EvalRecord",
    "EvalTrace",
    "OptimizeResult",
    "OptimizerConfig",
    "box_violation",
    "check_box",
    "from_unit",
    "latin_hypercube",
    "optimize",
    "to_unit",
]
