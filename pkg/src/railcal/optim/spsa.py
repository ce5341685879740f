"""Simultaneous-perturbation stochastic approximation.

Each iteration spends exactly two evaluations on a symmetric Bernoulli
perturbation and descends along the componentwise difference quotient.
Gains follow the standard decaying schedules; the stability constant is
a fixed fraction of the evaluation budget.
"""
from __future__ import annotations

from typing import Callable, Dict

import numpy as np

from .common import CountingObjective

DEFAULTS: Dict[str, object] = {
    "a": 0.001,
    "c": 0.007,
    "alpha": 0.602,
    "gamma": 0.101,
    "stability_frac": 0.1,  # A = stability_frac * budget
}


def gain_a(k: int, a: float, stability: float, alpha: float) -> float:
    """Step-size gain at 0-based iteration k."""
    return a / (k + 1.0 + stability) ** alpha


def gain_c(k: int, c: float, gamma: float) -> float:
    """Perturbation-size gain at 0-based iteration k."""
    return c / (k + 1.0) ** gamma


def two_sided_gradient(
    fn: Callable[[np.ndarray], float], theta: np.ndarray, c_k: float, delta: np.ndarray
) -> np.ndarray:
    """Componentwise simultaneous-perturbation gradient estimate."""
    z_plus = fn(theta + c_k * delta)
    z_minus = fn(theta - c_k * delta)
    return (z_plus - z_minus) / (2.0 * c_k * delta)


def run(
    tally: CountingObjective,
    lower: np.ndarray,
    upper: np.ndarray,
    theta_ini: np.ndarray,
    rng: np.random.Generator,
    hp: Dict[str, object],
) -> None:
    a = float(hp["a"])
    c = float(hp["c"])
    alpha = float(hp["alpha"])
    gamma = float(hp["gamma"])
    stability = float(hp["stability_frac"]) * tally.budget
    dim = lower.size

    theta = theta_ini.copy()
    tally(theta)
    k = 0
    while tally.remaining >= 2:
        c_k = gain_c(k, c, gamma)
        delta = rng.integers(0, 2, size=dim) * 2.0 - 1.0
        # Evaluation points are projected onto the box; the difference
        # quotient keeps the nominal 2*c_k*delta denominator.
        z_plus = tally(np.clip(theta + c_k * delta, lower, upper))
        z_minus = tally(np.clip(theta - c_k * delta, lower, upper))
        grad = (z_plus - z_minus) / (2.0 * c_k * delta)
        theta = np.clip(theta - gain_a(k, a, stability, alpha) * grad, lower, upper)
        k += 1
    if tally.remaining == 1:
        tally(theta)
