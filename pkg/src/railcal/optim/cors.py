"""Surrogate global search: cubic RBF interpolation, distance-gated refinement.

After a Latin-hypercube start, each step fits a cubic radial basis
surrogate (with linear tail) through every evaluated point, then picks
the candidate with the lowest surrogate value among those at least a
minimum spacing away from the evaluated set. The spacing requirement
cycles from most of the currently achievable fill distance down to
zero, so the search sweeps from space-filling exploration to local
polish. Candidates are random: half drawn uniformly over the box, half
perturbed around the incumbent and reflected back inside, so proposals
stay in the interior instead of piling up on the bound faces.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from .common import CountingObjective, from_unit, latin_hypercube, to_unit

DEFAULTS: Dict[str, object] = {
    "init_frac": 0.2,
    "spacing_cycle": (0.95, 0.25, 0.05, 0.03, 0.0),
    "pool_size": 2048,
    "local_sigma": 0.02,
}


@dataclass
class RBFSurrogate:
    """Cubic RBF plus linear polynomial, interpolating all fit points."""

    centers: np.ndarray
    rbf_coefs: np.ndarray
    lin_coefs: np.ndarray  # [constant, slope_1..slope_d]

    def __call__(self, Q: np.ndarray) -> np.ndarray:
        r = cdist(np.atleast_2d(Q), self.centers)
        return r**3 @ self.rbf_coefs + self.lin_coefs[0] + np.atleast_2d(Q) @ self.lin_coefs[1:]


def fit_rbf(X: np.ndarray, y: np.ndarray) -> RBFSurrogate:
    """Solve the saddle system for exact interpolation through (X, y)."""
    n, d = X.shape
    r = cdist(X, X)
    phi = r**3
    P = np.hstack([np.ones((n, 1)), X])
    A = np.zeros((n + d + 1, n + d + 1))
    A[:n, :n] = phi
    A[:n, n:] = P
    A[n:, :n] = P.T
    rhs = np.concatenate([y, np.zeros(d + 1)])
    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(A, rhs, rcond=None)[0]
    return RBFSurrogate(X.copy(), sol[:n], sol[n:])


def _reflect(points: np.ndarray) -> np.ndarray:
    """Fold points back into the unit box, mirror-style."""
    folded = np.abs(points) % 2.0
    return np.where(folded > 1.0, 2.0 - folded, folded)


def _propose(
    model: RBFSurrogate,
    X: np.ndarray,
    incumbent: np.ndarray,
    spacing_frac: float,
    rng: np.random.Generator,
    hp: Dict[str, object],
) -> np.ndarray:
    d = X.shape[1]
    half = int(hp["pool_size"]) // 2
    sigma = max(0.25 * spacing_frac, float(hp["local_sigma"]))
    local = _reflect(incumbent + sigma * rng.standard_normal((half, d)))
    pool = np.vstack([rng.random((half, d)), local])
    pool_dist = cdist(pool, X).min(axis=1)
    # gate on the fill distance the pool can actually achieve
    required_eff = max(spacing_frac * float(pool_dist.max()), 1e-9)
    feasible = pool_dist >= required_eff
    if not np.any(feasible):
        return pool[int(np.argmax(pool_dist))]
    scores = model(pool[feasible])
    return pool[feasible][int(np.argmin(scores))]


def run(
    tally: CountingObjective,
    lower: np.ndarray,
    upper: np.ndarray,
    theta_ini: np.ndarray,
    rng: np.random.Generator,
    hp: Dict[str, object],
) -> None:
    d = lower.size
    n_initial = max(2, round(float(hp["init_frac"]) * tally.budget))
    cycle: Tuple[float, ...] = tuple(hp["spacing_cycle"])

    X = [to_unit(theta_ini, lower, upper)]
    if n_initial > 1:
        X += list(latin_hypercube(n_initial - 1, d, rng))
    y = [tally(from_unit(x, lower, upper)) for x in X]

    step = 0
    while True:
        model = fit_rbf(np.array(X), np.array(y))
        incumbent = X[int(np.argmin(y))]
        spacing_frac = cycle[step % len(cycle)]
        step += 1
        q = _propose(model, np.array(X), incumbent, spacing_frac, rng, hp)
        y.append(tally(from_unit(q, lower, upper)))
        X.append(q)
