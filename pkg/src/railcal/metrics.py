"""Calibration objective: exit-flow error plus journey-time divergence.

The fit measure compares a simulated loading against observed
smart-card data on two axes: squared error of exit counts per
(origin, dest, exit interval) cell, and Kullback-Leibler divergence of
journey-time distributions on cells where both sides carry enough
samples. Simulated with common random numbers (one fixed seed per
calibration), the measure is deterministic in the parameter vector and
reaches exactly zero at the generating parameters.
"""
from __future__ import annotations

import csv
import time as _time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .capacity import CapacityParams
from .choice import ChoiceParams
from .model import BoundsError, ConfigError, Passenger, TimeGrid
from .sim import SimCase, SimResult, run_simulation

FlowKey = Tuple[str, str, int]

LAPLACE_EPS = 1e-6
N_CHOICE_COEFS = 4
N_CAPACITY_COEFS = 3
N_PARAMS = N_CHOICE_COEFS + N_CAPACITY_COEFS

# Display names for the calibrated vector, in its canonical order.
PARAM_NAMES = (
    "ivt_coef",
    "walk_coef",
    "transfer_coef",
    "overlap_coef",
    "car_capacity",
    "load_response",
    "queue_response",
)


@dataclass(frozen=True)
class ObjectiveWeights:
    """Weights and eligibility settings of the fit measure."""

    flow_weight: float = 1.0
    dist_weight: float = 1000.0
    min_samples: int = 10  # cells need strictly more samples than this
    bin_s: int = 60


def exit_flows(result: SimResult, grid: TimeGrid) -> Dict[FlowKey, int]:
    """Count exited passengers per (origin, dest, exit interval)."""
    flows: Dict[FlowKey, int] = {}
    case = result.case
    for i in np.flatnonzero(result.tap_out >= 0):
        od = case.od_list[case.pax_od[i]]
        key = (od[0], od[1], grid.interval_of(int(result.tap_out[i])))
        flows[key] = flows.get(key, 0) + 1
    return flows


def journey_samples(result: SimResult, grid: TimeGrid) -> Dict[FlowKey, np.ndarray]:
    """Journey times (seconds) of exited passengers, grouped like exit_flows."""
    groups: Dict[FlowKey, List[int]] = {}
    case = result.case
    for i in np.flatnonzero(result.tap_out >= 0):
        od = case.od_list[case.pax_od[i]]
        key = (od[0], od[1], grid.interval_of(int(result.tap_out[i])))
        groups.setdefault(key, []).append(int(result.tap_out[i] - case.tap_in[i]))
    return {k: np.array(v, dtype=np.int64) for k, v in groups.items()}


def observed_from_records(
    records: Sequence[Passenger], grid: TimeGrid
) -> Tuple[Dict[FlowKey, int], Dict[FlowKey, np.ndarray]]:
    """Exit flows and journey-time samples taken directly from card records."""
    flows: Dict[FlowKey, int] = {}
    groups: Dict[FlowKey, List[int]] = {}
    for p in records:
        if p.tap_out_s is None:
            continue
        key = (p.origin, p.dest, grid.interval_of(p.tap_out_s))
        flows[key] = flows.get(key, 0) + 1
        groups.setdefault(key, []).append(p.tap_out_s - p.tap_in_s)
    return flows, {k: np.array(v, dtype=np.int64) for k, v in groups.items()}


def histogram_distribution(
    samples: np.ndarray, bin_s: int = 60, n_bins: Optional[int] = None
) -> np.ndarray:
    """Fixed-width histogram from 0, Laplace-smoothed and normalized.

    The grid spans ceil-to-bin-multiple of the largest sample unless a
    wider bin count is imposed (used to put two sample sets on one grid).
    """
    if samples.size == 0:
        raise ConfigError("cannot build a distribution from zero samples")
    if np.any(samples < 0):
        raise ConfigError("journey times must be nonnegative")
    needed = int(samples.max()) // bin_s + 1
    if n_bins is None:
        n_bins = needed
    elif n_bins < needed:
        raise ConfigError(f"n_bins={n_bins} cannot hold samples up to {int(samples.max())}")
    counts = np.bincount(samples // bin_s, minlength=n_bins).astype(float)
    counts += LAPLACE_EPS
    return counts / counts.sum()


def estimate_jtd(
    samples: np.ndarray, bin_s: int = 60, min_samples: int = 10
) -> Optional[np.ndarray]:
    """Journey-time distribution, or None when the cell has too few samples."""
    if samples.size <= min_samples:
        return None
    return histogram_distribution(samples, bin_s)


def kl_divergence(f: np.ndarray, g: np.ndarray) -> float:
    """KL divergence (nats) between two strictly positive distributions."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape:
        raise ConfigError(f"distributions must share one grid: {f.shape} vs {g.shape}")
    if np.any(f <= 0) or np.any(g <= 0):
        raise ConfigError("distributions must be smoothed (no zero mass) before KL")
    return float(np.sum(f * np.log(f / g)))


def split_theta(
    theta: np.ndarray, scale: float = 1.0, overlap_decay: float = 1.0
) -> Tuple[ChoiceParams, CapacityParams]:
    """Split the 7-vector into choice and capacity parameter blocks."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (N_PARAMS,):
        raise BoundsError(f"parameter vector must have {N_PARAMS} components")
    choice = ChoiceParams(
        attr_coefs=(float(theta[0]), float(theta[1]), float(theta[2])),
        overlap_coef=float(theta[3]),
        scale=scale,
        overlap_decay=overlap_decay,
    )
    cap = CapacityParams(float(theta[4]), float(theta[5]), float(theta[6]))
    return choice, cap


@dataclass
class CalibrationTarget:
    """Everything a fit evaluation needs besides the parameter vector."""

    case: SimCase
    observed_flows: Dict[FlowKey, int]
    observed_samples: Dict[FlowKey, np.ndarray]
    lower: np.ndarray
    upper: np.ndarray
    seed: int
    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)
    choice_scale: float = 1.0
    overlap_decay: float = 1.0

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != (N_PARAMS,) or self.upper.shape != (N_PARAMS,):
            raise ConfigError(f"bounds must have {N_PARAMS} components")
        if np.any(self.lower > self.upper):
            raise ConfigError("lower bound exceeds upper bound")

    def split(self, theta: np.ndarray) -> Tuple[ChoiceParams, CapacityParams]:
        return split_theta(theta, self.choice_scale, self.overlap_decay)


def objective_value(theta: np.ndarray, target: CalibrationTarget) -> float:
    """Fit measure at one parameter vector, using common random numbers."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (N_PARAMS,):
        raise BoundsError(f"parameter vector must have {N_PARAMS} components")
    if np.any(theta < target.lower) or np.any(theta > target.upper):
        raise BoundsError(
            f"parameter vector {theta.tolist()} outside bounds "
            f"[{target.lower.tolist()}, {target.upper.tolist()}]"
        )
    choice_params, cap_params = target.split(theta)
    result = run_simulation(target.case, choice_params, cap_params, target.seed)
    grid = target.case.grid
    w = target.weights

    model_flows = exit_flows(result, grid)
    flow_term = 0.0
    for key in model_flows.keys() | target.observed_flows.keys():
        diff = model_flows.get(key, 0) - target.observed_flows.get(key, 0)
        flow_term += float(diff) * float(diff)

    model_samples = journey_samples(result, grid)
    dist_term = 0.0
    for key, obs in target.observed_samples.items():
        if obs.size <= w.min_samples:
            continue
        mod = model_samples.get(key)
        if mod is None or mod.size <= w.min_samples:
            continue
        # One shared grid per cell so the divergence is well defined.
        n_bins = int(max(mod.max(), obs.max())) // w.bin_s + 1
        f = histogram_distribution(mod, w.bin_s, n_bins)
        g = histogram_distribution(obs, w.bin_s, n_bins)
        dist_term += kl_divergence(f, g)

    return w.flow_weight * flow_term + w.dist_weight * dist_term


class FitEvaluator:
    """Callable objective with an optional per-call CSV log.

    The log records eval index, the parameter vector, the value, and the
    wall time of each call; it is diagnostic output, deliberately left
    out of reproducibility digests.
    """

    def __init__(self, target: CalibrationTarget, log_path: Optional[str] = None):
        self.target = target
        self.log_path = log_path
        self.calls = 0
        if log_path:
            with open(log_path, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(
                    ["eval_index"]
                    + [f"theta_{i + 1}" for i in range(N_PARAMS)]
                    + ["Z", "wall_time_s"]
                )

    def __call__(self, theta: np.ndarray) -> float:
        started = _time.perf_counter()
        value = objective_value(theta, self.target)
        self.calls += 1
        if self.log_path:
            with open(self.log_path, "a", encoding="utf-8", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(
                    [self.calls]
                    + [repr(float(x)) for x in np.asarray(theta, dtype=float)]
                    + [repr(float(value)), f"{_time.perf_counter() - started:.6f}"]
                )
        return value
