"""Mesh-adaptive direct search, poll-only, with orthogonal direction frames.

Each poll builds N+1 directions that positively span the space: the
columns of a Householder reflection of a quasirandom (Halton) unit
vector, plus the negated column sum. The frame size halves after a
failed poll, doubles (capped at 1) after a success. Polling is
opportunistic: the first strictly improving point is taken.
"""
from __future__ import annotations

from typing import Dict

import numpy as np

from .common import CountingObjective, from_unit, to_unit

DEFAULTS: Dict[str, object] = {
    "initial_frame": 1.0,
    "max_frame": 1.0,
}

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def halton_point(index: int, dim: int) -> np.ndarray:
    """Point `index` (>= 1) of the Halton sequence in [0, 1)^dim."""
    if dim > len(_PRIMES):
        raise ValueError(f"halton_point supports up to {len(_PRIMES)} dimensions")
    out = np.empty(dim)
    for d in range(dim):
        base = _PRIMES[d]
        value, f, i = 0.0, 1.0 / base, index
        while i > 0:
            value += f * (i % base)
            i //= base
            f /= base
        out[d] = value
    return out


def poll_directions(dim: int, halton_index: int) -> np.ndarray:
    """(dim + 1) x dim positive-spanning direction set for one poll."""
    v = 2.0 * halton_point(halton_index, dim) - 1.0
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        v = np.zeros(dim)
        v[0] = 1.0
        norm = 1.0
    v = v / norm
    basis = np.eye(dim) - 2.0 * np.outer(v, v)  # orthonormal columns
    return np.vstack([basis.T, -basis.sum(axis=1)])


def run(
    tally: CountingObjective,
    lower: np.ndarray,
    upper: np.ndarray,
    theta_ini: np.ndarray,
    rng: np.random.Generator,
    hp: Dict[str, object],
) -> None:
    frame = float(hp["initial_frame"])
    max_frame = float(hp["max_frame"])
    dim = lower.size

    incumbent = to_unit(theta_ini, lower, upper)
    best_value = tally(from_unit(incumbent, lower, upper))
    halton_index = int(rng.integers(1, 100_000))  # seeded start of the direction stream

    while True:
        directions = poll_directions(dim, halton_index)
        halton_index += 1
        success = False
        polled_any = False
        for d in directions:
            candidate = np.clip(incumbent + frame * d, 0.0, 1.0)
            if np.array_equal(candidate, incumbent):
                continue  # fully clipped away: nothing new to try
            polled_any = True
            value = tally(from_unit(candidate, lower, upper))
            if value < best_value:
                incumbent, best_value = candidate, value
                success = True
                break
        frame = min(2.0 * frame, max_frame) if success else frame / 2.0
        if not polled_any and frame < 1e-15:
            frame = max_frame  # frame underflow: restart coarse polling
