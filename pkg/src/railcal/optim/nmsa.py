"""Simplex search (Nelder-Mead) with a penalty wall at the bounds.

Fully deterministic: the initial simplex is the start point plus one
fixed-fraction step along each axis, and no random numbers are drawn.
Out-of-bounds vertices are scored by a large penalty plus the squared
violation, without spending simulator evaluations on them.
"""
from __future__ import annotations

from typing import Dict, List

import numpy as np

from .common import BudgetExhausted, CountingObjective, box_violation

DEFAULTS: Dict[str, object] = {
    "reflection": 1.0,
    "expansion": 2.0,
    "contraction": 0.5,
    "shrink": 0.5,
    "init_step_frac": 0.05,
    "penalty": 1e12,
}


def reflect_point(centroid: np.ndarray, worst: np.ndarray, coef: float) -> np.ndarray:
    """Point at `coef` times the centroid-to-worst distance, beyond the centroid."""
    return centroid + coef * (centroid - worst)


def run(
    tally: CountingObjective,
    lower: np.ndarray,
    upper: np.ndarray,
    theta_ini: np.ndarray,
    rng: np.random.Generator,  # unused: this search is deterministic
    hp: Dict[str, object],
) -> None:
    rho = float(hp["reflection"])
    chi = float(hp["expansion"])
    gamma = float(hp["contraction"])
    sigma = float(hp["shrink"])
    step_frac = float(hp["init_step_frac"])
    penalty = float(hp["penalty"])
    dim = lower.size

    def score(x: np.ndarray) -> float:
        viol = box_violation(x, lower, upper)
        if viol > 0.0:
            return penalty + viol
        return tally(x)

    simplex: List[np.ndarray] = [theta_ini.copy()]
    for i in range(dim):
        vertex = theta_ini.copy()
        vertex[i] += step_frac * (upper[i] - lower[i])
        simplex.append(vertex)
    values = [score(v) for v in simplex]

    while True:
        order = np.argsort(np.array(values), kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]

        reflected = reflect_point(centroid, worst, rho)
        f_reflected = score(reflected)
        if f_reflected < values[0]:
            expanded = centroid + chi * (reflected - centroid)
            f_expanded = score(expanded)
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
        elif f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
        elif f_reflected < values[-1]:
            contracted = centroid + gamma * (reflected - centroid)
            f_contracted = score(contracted)
            if f_contracted <= f_reflected:
                simplex[-1], values[-1] = contracted, f_contracted
            else:
                _shrink(simplex, values, sigma, score)
        else:
            contracted = centroid - gamma * (centroid - worst)
            f_contracted = score(contracted)
            if f_contracted < values[-1]:
                simplex[-1], values[-1] = contracted, f_contracted
            else:
                _shrink(simplex, values, sigma, score)


def _shrink(simplex: List[np.ndarray], values: List[float], sigma: float, score) -> None:
    best = simplex[0]
    for i in range(1, len(simplex)):
        simplex[i] = best + sigma * (simplex[i] - best)
        values[i] = score(simplex[i])
