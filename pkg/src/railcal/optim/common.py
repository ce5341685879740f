"""Shared plumbing for the bounded black-box optimizers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..model import ConfigError, RailcalError


class BudgetExhausted(RailcalError):
    """Raised by the counting wrapper when the evaluation budget is spent."""


@dataclass(frozen=True)
class EvalRecord:
    index: int  # 1-based position in the evaluation sequence
    theta: np.ndarray
    value: float


@dataclass
class EvalTrace:
    """Every objective call of one optimization run, in call order."""

    algorithm: str
    seed: Optional[int]
    hyperparams: Dict[str, object] = field(default_factory=dict)
    records: List[EvalRecord] = field(default_factory=list)

    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(np.array([r.value for r in self.records]))

    def best(self) -> EvalRecord:
        if not self.records:
            raise ConfigError("empty trace has no best point")
        return min(self.records, key=lambda r: (r.value, r.index))

    def __len__(self) -> int:
        return len(self.records)


class CountingObjective:
    """Budget-enforcing wrapper; optimizers may only evaluate through it.

    Every call is appended to the trace, so the argmin over the trace is
    exactly the argmin over everything the algorithm ever saw.
    """

    def __init__(self, fn: Callable[[np.ndarray], float], budget: int, trace: EvalTrace):
        if budget < 1:
            raise ConfigError(f"budget must be >= 1, got {budget}")
        self._fn = fn
        self.budget = budget
        self.trace = trace

    @property
    def calls(self) -> int:
        return len(self.trace.records)

    @property
    def remaining(self) -> int:
        return self.budget - self.calls

    def __call__(self, theta: np.ndarray) -> float:
        if self.calls >= self.budget:
            raise BudgetExhausted(f"budget of {self.budget} evaluations exhausted")
        theta = np.array(theta, dtype=float, copy=True)
        value = float(self._fn(theta))
        self.trace.records.append(EvalRecord(self.calls + 1, theta, value))
        return value


def check_box(lower: np.ndarray, upper: np.ndarray, theta_ini: np.ndarray) -> None:
    if lower.shape != upper.shape or lower.shape != theta_ini.shape or lower.ndim != 1:
        raise ConfigError("bounds and start point must be 1-D with one shared shape")
    if np.any(lower > upper):
        raise ConfigError("lower bound exceeds upper bound")
    if np.any(theta_ini < lower) or np.any(theta_ini > upper):
        raise ConfigError("start point lies outside the bounds")


def latin_hypercube(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """n stratified points in [0, 1)^dim, one per row."""
    out = np.empty((n, dim))
    for d in range(dim):
        out[:, d] = (rng.permutation(n) + rng.random(n)) / n
    return out


def to_unit(x: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    span = np.where(upper > lower, upper - lower, 1.0)
    return (x - lower) / span


def from_unit(u: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    return lower + u * (upper - lower)


def box_violation(theta: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> float:
    """Sum of squared componentwise bound violations (0 inside the box)."""
    below = np.maximum(lower - theta, 0.0)
    above = np.maximum(theta - upper, 0.0)
    return float(np.sum(below * below) + np.sum(above * above))
