"""Bayesian optimization: Gaussian-process surrogate, expected improvement.

The surrogate is a zero-mean GP (on standardized outputs) with a
squared-exponential kernel and per-dimension length scales, refit by
marginal-likelihood ascent on a fixed cadence. The next point maximizes
expected improvement, located by batched projected gradient ascent from
seeded multi-start positions; the inner search spends no simulator
evaluations.
"""
from __future__ import annotations

import math
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.optimize import minimize
from scipy.special import ndtr

from .common import CountingObjective, from_unit, latin_hypercube, to_unit

DEFAULTS: Dict[str, object] = {
    "n_initial": 5,
    "refit_every": 5,
    "jitter": 1e-6,
    "n_starts": 64,
    "ascent_steps": 60,
}

_LOG_2PI = math.log(2.0 * math.pi)


class GaussianProcess:
    """GP regressor on the unit box with ARD squared-exponential kernel."""

    def __init__(self, jitter: float = 1e-6):
        self.jitter = jitter
        self.log_amp = 0.0
        self.log_ls: Optional[np.ndarray] = None
        self._X: Optional[np.ndarray] = None

    def _cross_kernel(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        ls = np.exp(self.log_ls)
        sq = np.sum(((A[:, None, :] - B[None, :, :]) / ls) ** 2, axis=2)
        return np.exp(2.0 * self.log_amp) * np.exp(-0.5 * sq)

    @staticmethod
    def _nlml_and_grad(params: np.ndarray, X: np.ndarray, y: np.ndarray, jitter: float):
        n, d = X.shape
        log_amp, log_ls = params[0], params[1:]
        ls = np.exp(log_ls)
        diff = X[:, None, :] - X[None, :, :]
        sq = np.sum((diff / ls) ** 2, axis=2)
        base = np.exp(2.0 * log_amp) * np.exp(-0.5 * sq)
        K = base + jitter * np.eye(n)
        try:
            cho = cho_factor(K, lower=True)
        except LinAlgError:
            return 1e12, np.zeros_like(params)
        alpha = cho_solve(cho, y)
        nlml = 0.5 * float(y @ alpha) + float(np.sum(np.log(np.diag(cho[0])))) + 0.5 * n * _LOG_2PI
        K_inv = cho_solve(cho, np.eye(n))
        outer = np.outer(alpha, alpha) - K_inv
        grad = np.empty_like(params)
        grad[0] = -0.5 * float(np.sum(outer * (2.0 * base)))
        for j in range(d):
            dK = base * (diff[:, :, j] ** 2 / ls[j] ** 2)
            grad[j + 1] = -0.5 * float(np.sum(outer * dK))
        return nlml, grad

    def fit(self, X: np.ndarray, y: np.ndarray, refit_hypers: bool) -> None:
        n, d = X.shape
        self._X = X
        self._y_mean = float(np.mean(y))
        self._y_std = float(np.std(y))
        if self._y_std < 1e-12:
            self._y_std = 1.0
        self._y = (y - self._y_mean) / self._y_std
        if self.log_ls is None:
            self.log_ls = np.zeros(d)
        if refit_hypers:
            params = np.concatenate([[self.log_amp], self.log_ls])
            bounds = [(math.log(1e-3), math.log(1e3))] + [(math.log(0.05), math.log(20.0))] * d
            res = minimize(
                self._nlml_and_grad,
                params,
                args=(X, self._y, self.jitter),
                jac=True,
                method="L-BFGS-B",
                bounds=bounds,
                options={"maxiter": 60},
            )
            self.log_amp, self.log_ls = float(res.x[0]), res.x[1:].copy()
        jitter = self.jitter
        while True:
            K = self._cross_kernel(X, X) + jitter * np.eye(n)
            try:
                self._cho = cho_factor(K, lower=True)
                break
            except LinAlgError:
                jitter *= 10.0  # ill-conditioned data: back off until factorizable
                if jitter > 1.0:
                    raise
        self._alpha = cho_solve(self._cho, self._y)

    def posterior(self, Q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Mean and variance at query points, in original output units."""
        mu, var = self._posterior_std(Q)
        return mu * self._y_std + self._y_mean, var * self._y_std**2

    def _posterior_std(self, Q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        Kq = self._cross_kernel(Q, self._X)
        mu = Kq @ self._alpha
        V = cho_solve(self._cho, Kq.T)
        var = np.exp(2.0 * self.log_amp) + self.jitter - np.sum(Kq * V.T, axis=1)
        return mu, np.maximum(var, 1e-18)

    def expected_improvement(self, Q: np.ndarray) -> np.ndarray:
        ei, _ = self._ei_and_grad(np.atleast_2d(Q))
        return ei

    def _ei_and_grad(self, Q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        ls2 = np.exp(self.log_ls) ** 2
        Kq = self._cross_kernel(Q, self._X)
        mu = Kq @ self._alpha
        V = cho_solve(self._cho, Kq.T)
        var = np.maximum(np.exp(2.0 * self.log_amp) + self.jitter - np.sum(Kq * V.T, axis=1), 1e-18)
        sd = np.sqrt(var)
        best = float(np.min(self._y))
        imp = best - mu
        z = imp / sd
        pdf = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
        cdf = ndtr(z)
        ei = imp * cdf + sd * pdf

        d = Q.shape[1]
        dmu = np.empty((Q.shape[0], d))
        dvar = np.empty((Q.shape[0], d))
        for j in range(d):
            dKq = Kq * (self._X[None, :, j] - Q[:, None, j]) / ls2[j]
            dmu[:, j] = dKq @ self._alpha
            dvar[:, j] = -2.0 * np.sum(dKq * V.T, axis=1)
        dsd = dvar / (2.0 * sd[:, None])
        dei = -cdf[:, None] * dmu + pdf[:, None] * dsd
        return ei, dei


def _propose(gp: GaussianProcess, X: np.ndarray, rng: np.random.Generator,
             n_starts: int, steps: int) -> np.ndarray:
    d = X.shape[1]
    starts = latin_hypercube(n_starts, d, rng)
    x = starts.copy()
    for t in range(steps):
        _, grad = gp._ei_and_grad(x)
        norms = np.linalg.norm(grad, axis=1, keepdims=True)
        x = np.clip(x + (0.08 * 0.96**t) * grad / (norms + 1e-12), 0.0, 1.0)
    candidates = np.vstack([x, starts])
    ei = gp.expected_improvement(candidates)
    best = candidates[int(np.argmax(ei))]
    flat = float(np.max(ei)) <= 1e-16
    too_close = float(np.min(np.linalg.norm(X - best, axis=1))) < 1e-10
    if flat or too_close:  # dead acquisition surface: fall back to exploration
        return rng.random(d)
    return best


def run(
    tally: CountingObjective,
    lower: np.ndarray,
    upper: np.ndarray,
    theta_ini: np.ndarray,
    rng: np.random.Generator,
    hp: Dict[str, object],
) -> None:
    n_initial = int(hp["n_initial"])
    refit_every = int(hp["refit_every"])
    d = lower.size

    X = [to_unit(theta_ini, lower, upper)]
    if n_initial > 1:
        X += list(latin_hypercube(n_initial - 1, d, rng))
    y = [tally(from_unit(x, lower, upper)) for x in X]

    gp = GaussianProcess(jitter=float(hp["jitter"]))
    last_fit = 0
    while True:
        refit = last_fit == 0 or len(y) - last_fit >= refit_every
        gp.fit(np.array(X), np.array(y), refit_hypers=refit)
        if refit:
            last_fit = len(y)
        q = _propose(gp, np.array(X), rng, int(hp["n_starts"]), int(hp["ascent_steps"]))
        y.append(tally(from_unit(q, lower, upper)))
        X.append(q)
