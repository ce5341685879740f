"""Real-coded genetic algorithm: blend crossover, Gaussian mutation."""
from __future__ import annotations

from typing import Dict, List

import numpy as np

from .common import CountingObjective

DEFAULTS: Dict[str, object] = {
    "pop_size": 6,
    "crossover_prob": 0.8,
    "mutation_prob": 0.4,
    "blend_alpha": 0.5,
    "mutation_sigma_frac": 0.1,
    "tournament_size": 2,
}


def blend_crossover(
    p1: np.ndarray, p2: np.ndarray, alpha: float, rng: np.random.Generator
) -> tuple:
    """Per-gene blend: children drawn from the stretched segment between parents.

    Written as p + g*(q - p) so identical parents reproduce exactly.
    """
    g = (1.0 + 2.0 * alpha) * rng.random(p1.size) - alpha
    c1 = p1 + g * (p2 - p1)
    c2 = p2 + g * (p1 - p2)
    return c1, c2


def run(
    tally: CountingObjective,
    lower: np.ndarray,
    upper: np.ndarray,
    theta_ini: np.ndarray,
    rng: np.random.Generator,
    hp: Dict[str, object],
) -> None:
    pop_size = int(hp["pop_size"])
    cx_prob = float(hp["crossover_prob"])
    mut_prob = float(hp["mutation_prob"])
    alpha = float(hp["blend_alpha"])
    sigma = float(hp["mutation_sigma_frac"]) * (upper - lower)
    k_tourn = int(hp["tournament_size"])
    dim = lower.size

    pop: List[np.ndarray] = [theta_ini.copy()]
    while len(pop) < pop_size:
        pop.append(lower + rng.random(dim) * (upper - lower))
    fitness = [tally(x) for x in pop]

    while True:
        parents: List[np.ndarray] = []
        for _ in range(pop_size):
            drawn = rng.integers(0, pop_size, size=k_tourn)
            winner = drawn[int(np.argmin([fitness[i] for i in drawn]))]
            parents.append(pop[winner])
        children: List[np.ndarray] = []
        for i in range(0, pop_size - 1, 2):
            if rng.random() < cx_prob:
                c1, c2 = blend_crossover(parents[i], parents[i + 1], alpha, rng)
            else:
                c1, c2 = parents[i].copy(), parents[i + 1].copy()
            children += [c1, c2]
        if len(children) < pop_size:  # odd population: last parent passes through
            children.append(parents[-1].copy())
        for j in range(pop_size):
            if rng.random() < mut_prob:
                children[j] = children[j] + rng.normal(0.0, 1.0, size=dim) * sigma
            children[j] = np.clip(children[j], lower, upper)
        fitness = [tally(x) for x in children]
        pop = children
