"""Generalized simulated annealing with a distorted Cauchy-Lorentz visit step.

The visiting distribution and the two-parameter acceptance rule follow
the generalized (Tsallis-statistics) annealing family; the default
visit shape, acceptance shape, and starting temperature match the
widely used reference implementation's defaults.
"""
from __future__ import annotations

import math
from typing import Dict

import numpy as np

from .common import CountingObjective

DEFAULTS: Dict[str, object] = {
    "visit_shape": 2.62,
    "accept_shape": -5.0,
    "initial_temp": 5230.0,
}


def visiting_temperature(initial_temp: float, visit_shape: float, k: int) -> float:
    """Temperature at annealing step k (k = 0 gives the initial temperature)."""
    qv = visit_shape
    num = 2.0 ** (qv - 1.0) - 1.0
    den = (1.0 + k) ** (qv - 1.0) - 1.0
    return initial_temp * num / den if k > 0 else initial_temp


def acceptance_probability(delta: float, temperature: float, accept_shape: float) -> float:
    """Probability of accepting an uphill move of size delta at one temperature."""
    if delta <= 0.0:
        return 1.0
    base = 1.0 - (1.0 - accept_shape) * delta / temperature
    if base <= 0.0:
        return 0.0
    return base ** (1.0 / (1.0 - accept_shape))


def visit_steps(rng: np.random.Generator, temperature: float, visit_shape: float, dim: int) -> np.ndarray:
    """Heavy-tailed displacement vector of the distorted Cauchy-Lorentz visit."""
    qv = visit_shape
    factor1 = math.exp(math.log(temperature) / (qv - 1.0))
    factor2 = math.exp((4.0 - qv) * math.log(qv - 1.0))
    factor3 = math.exp((2.0 - qv) * math.log(2.0) / (qv - 1.0))
    factor4 = math.sqrt(math.pi) * factor1 * factor2 / (factor3 * (3.0 - qv))
    factor5 = 1.0 / (qv - 1.0) - 0.5
    d1 = 2.0 - factor5
    factor6 = math.pi * (1.0 - factor5) / math.sin(math.pi * (1.0 - factor5)) / math.exp(math.lgamma(d1))
    sigmax = math.exp(-(qv - 1.0) * math.log(factor6 / factor4) / (3.0 - qv))
    x = sigmax * rng.standard_normal(dim)
    y = rng.standard_normal(dim)
    den = np.exp((qv - 1.0) * np.log(np.maximum(np.abs(y), 1e-300)) / (3.0 - qv))
    return x / den


def run(
    tally: CountingObjective,
    lower: np.ndarray,
    upper: np.ndarray,
    theta_ini: np.ndarray,
    rng: np.random.Generator,
    hp: Dict[str, object],
) -> None:
    qv = float(hp["visit_shape"])
    qa = float(hp["accept_shape"])
    t0 = float(hp["initial_temp"])

    span = upper - lower
    current = theta_ini.copy()
    energy = tally(current)
    k = 0
    while True:
        temp = visiting_temperature(t0, qv, k)
        moved = current + visit_steps(rng, temp, qv, lower.size)
        # wrap into the box so oversized visits stay global, not cornered
        offset = np.fmod(moved - lower, span)
        candidate = lower + np.where(offset < 0.0, offset + span, offset)
        candidate[np.abs(candidate - lower) < 1e-10] += 1e-10
        value = tally(candidate)
        delta = value - energy
        accept_temp = temp / (k + 1.0)
        if delta <= 0.0 or rng.random() <= acceptance_probability(delta, accept_temp, qa):
            current, energy = candidate, value
        k += 1
