"""Experiment runner: algorithm-by-replication grids over one dataset.

A plan names a dataset, a set of search algorithms, a shared evaluation
budget, and a replication count. Every cell runs the full calibration
loop with its own optimizer seed (base seed plus replication number);
deterministic algorithms run a single cell. The report step writes the
raw traces, the mean/spread convergence curves aligned by evaluation
index, the final-estimate table, and a manifest that suffices to rerun
the whole experiment byte-identically.
"""
from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import fileio
from .metrics import FitEvaluator, N_PARAMS
from .model import ConfigError, DatasetError
from .optim import ALGORITHMS, DETERMINISTIC_ALGORITHMS, OptimizerConfig, optimize
from .synth import load_target, read_manifest

TRACES_FILE = "traces.csv"
CONVERGENCE_FILE = "convergence.csv"
ESTIMATES_FILE = "estimates.csv"
EXPERIMENT_MANIFEST_FILE = "experiment.json"
EXPERIMENT_KIND = "railcal-experiment"

_THETA_COLS = [f"theta_{i + 1}" for i in range(N_PARAMS)]


@dataclass(frozen=True)
class ExperimentPlan:
    """One calibration experiment over a generated dataset."""

    dataset_dir: str
    algorithms: Tuple[str, ...] = ALGORITHMS
    budget: int = 100
    replications: int = 5
    base_seed: int = 0
    workers: int = 1
    sim_seed: Optional[int] = None  # None: common random numbers with generation

    def __post_init__(self):
        if self.replications < 1:
            raise ConfigError("replications must be at least 1")
        if self.budget < 1:
            raise ConfigError("budget must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ConfigError(f"unknown algorithms {unknown}; available: {list(ALGORITHMS)}")

    def cells(self) -> List[Tuple[str, int, int]]:
        """(algorithm, replication, optimizer seed) for every run of the plan."""
        out = []
        for algorithm in self.algorithms:
            reps = 1 if algorithm in DETERMINISTIC_ALGORITHMS else self.replications
            for r in range(1, reps + 1):
                out.append((algorithm, r, self.base_seed + r))
        return out


@dataclass
class CellResult:
    algorithm: str
    replication: int
    seed: int
    deterministic: bool
    # parallel arrays over evaluation index 1..n
    thetas: np.ndarray
    values: np.ndarray
    best_theta: np.ndarray
    best_value: float

    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(self.values)


@dataclass
class ExperimentResult:
    plan: ExperimentPlan
    dataset_manifest: Dict[str, object]
    cells: List[CellResult] = field(default_factory=list)

    def cells_for(self, algorithm: str) -> List[CellResult]:
        return [c for c in self.cells if c.algorithm == algorithm]


def _run_cell(
    dataset_dir: str,
    sim_seed: Optional[int],
    algorithm: str,
    replication: int,
    opt_seed: int,
    budget: int,
) -> CellResult:
    """One full calibration run; module-level so worker processes can call it."""
    target, _ = load_target(dataset_dir, sim_seed)
    theta_ini = (target.lower + target.upper) / 2.0
    config = OptimizerConfig(algorithm=algorithm, budget=budget, seed=opt_seed)
    outcome = optimize(FitEvaluator(target), target.lower, target.upper, theta_ini, config)
    thetas = np.array([rec.theta for rec in outcome.trace.records], dtype=float)
    values = np.array([rec.value for rec in outcome.trace.records], dtype=float)
    return CellResult(
        algorithm=algorithm,
        replication=replication,
        seed=opt_seed,
        deterministic=algorithm in DETERMINISTIC_ALGORITHMS,
        thetas=thetas,
        values=values,
        best_theta=np.asarray(outcome.best_theta, dtype=float),
        best_value=float(outcome.best_value),
    )


def run_experiment(plan: ExperimentPlan) -> ExperimentResult:
    """Run every cell of the plan, in parallel when workers allow."""
    dataset_manifest = read_manifest(plan.dataset_dir)
    cells = plan.cells()
    args = [
        (plan.dataset_dir, plan.sim_seed, alg, rep, seed, plan.budget)
        for alg, rep, seed in cells
    ]
    if plan.workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            results = list(pool.map(_run_cell, *zip(*args)))
    else:
        results = [_run_cell(*a) for a in args]
    return ExperimentResult(plan=plan, dataset_manifest=dataset_manifest, cells=results)


def _write_traces(result: ExperimentResult, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["algorithm", "replication", "seed", "eval_index"] + _THETA_COLS + ["Z", "best_so_far"])
        for cell in result.cells:
            best = cell.best_so_far()
            for i in range(len(cell.values)):
                writer.writerow(
                    [cell.algorithm, cell.replication, cell.seed, i + 1]
                    + [repr(float(x)) for x in cell.thetas[i]]
                    + [repr(float(cell.values[i])), repr(float(best[i]))]
                )


def convergence_curves(result: ExperimentResult) -> Dict[str, Dict[str, np.ndarray]]:
    """Mean and spread of best-so-far per algorithm, aligned by eval index."""
    curves: Dict[str, Dict[str, np.ndarray]] = {}
    for algorithm in result.plan.algorithms:
        cells = result.cells_for(algorithm)
        if not cells:
            continue
        n = min(len(c.values) for c in cells)
        stack = np.stack([c.best_so_far()[:n] for c in cells])
        curves[algorithm] = {
            "mean": stack.mean(axis=0),
            "std": stack.std(axis=0),
            "n_replications": np.full(n, len(cells), dtype=int),
        }
    return curves


def _write_convergence(result: ExperimentResult, path: Path) -> None:
    curves = convergence_curves(result)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["algorithm", "eval_index", "mean_best", "std_best", "n_replications"])
        for algorithm in result.plan.algorithms:
            if algorithm not in curves:
                continue
            c = curves[algorithm]
            for i in range(len(c["mean"])):
                writer.writerow([
                    algorithm, i + 1,
                    repr(float(c["mean"][i])), repr(float(c["std"][i])),
                    int(c["n_replications"][i]),
                ])


def selected_estimates(result: ExperimentResult) -> Dict[str, CellResult]:
    """Per algorithm, the replication with the smallest final objective."""
    out: Dict[str, CellResult] = {}
    for algorithm in result.plan.algorithms:
        cells = result.cells_for(algorithm)
        if cells:
            out[algorithm] = min(cells, key=lambda c: (c.best_value, c.replication))
    return out


def _write_estimates(result: ExperimentResult, path: Path) -> None:
    chosen = selected_estimates(result)
    theta_true = result.dataset_manifest.get("theta_true")
    algorithms = [a for a in result.plan.algorithms if a in chosen]
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["parameter", "true_value"] + algorithms)
        for i, col in enumerate(_THETA_COLS):
            row = [col, repr(float(theta_true[i])) if theta_true is not None else ""]
            row += [repr(float(chosen[a].best_theta[i])) for a in algorithms]
            writer.writerow(row)
        writer.writerow(
            ["Z", repr(0.0)] + [repr(float(chosen[a].best_value)) for a in algorithms]
        )


def report(result: ExperimentResult, out_dir: str) -> Dict[str, object]:
    """Write traces, curves, estimates, and the rerun manifest; return the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: Dict[str, str] = {}
    if result.cells:
        _write_traces(result, out / TRACES_FILE)
        _write_convergence(result, out / CONVERGENCE_FILE)
        _write_estimates(result, out / ESTIMATES_FILE)
        for name in (TRACES_FILE, CONVERGENCE_FILE, ESTIMATES_FILE):
            files[name] = fileio.sha256_file(str(out / name))

    plan = result.plan
    manifest: Dict[str, object] = {
        "kind": EXPERIMENT_KIND,
        "plan": {
            "dataset_dir": plan.dataset_dir,
            "algorithms": list(plan.algorithms),
            "budget": plan.budget,
            "replications": plan.replications,
            "base_seed": plan.base_seed,
            "workers": plan.workers,
            "sim_seed": plan.sim_seed,
        },
        "cells": [
            {
                "algorithm": c.algorithm,
                "replication": c.replication,
                "seed": c.seed,
                "deterministic": c.deterministic,
                "best_value": float(c.best_value),
                "best_theta": [float(x) for x in c.best_theta],
            }
            for c in result.cells
        ],
        "dataset": result.dataset_manifest,
        "digests": files,
    }
    with open(out / EXPERIMENT_MANIFEST_FILE, "w", encoding="utf-8", newline="") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return manifest


def run_and_report(plan: ExperimentPlan, out_dir: str) -> Tuple[ExperimentResult, Dict[str, object]]:
    result = run_experiment(plan)
    manifest = report(result, out_dir)
    return result, manifest


def read_experiment_manifest(experiment_dir: str) -> Dict[str, object]:
    path = Path(experiment_dir) / EXPERIMENT_MANIFEST_FILE
    if not path.exists():
        raise DatasetError(
            f"{path} not found: {experiment_dir!r} is not an experiment directory"
        )
    with open(path, "r", encoding="utf-8") as f:
        manifest = json.load(f)
    if manifest.get("kind") != EXPERIMENT_KIND:
        raise DatasetError(f"{path}: unexpected manifest kind {manifest.get('kind')!r}")
    return manifest


def plan_from_manifest(manifest: Dict[str, object]) -> ExperimentPlan:
    p = manifest["plan"]
    return ExperimentPlan(
        dataset_dir=str(p["dataset_dir"]),
        algorithms=tuple(p["algorithms"]),
        budget=int(p["budget"]),
        replications=int(p["replications"]),
        base_seed=int(p["base_seed"]),
        workers=int(p["workers"]),
        sim_seed=None if p.get("sim_seed") is None else int(p["sim_seed"]),
    )


def rerun_from_manifest(experiment_dir: str, out_dir: str) -> Dict[str, object]:
    """Replay an experiment from its manifest; outputs must match digests."""
    manifest = read_experiment_manifest(experiment_dir)
    plan = plan_from_manifest(manifest)
    _, new_manifest = run_and_report(plan, out_dir)
    return new_manifest


def summary_rows(result: ExperimentResult) -> List[Dict[str, object]]:
    """Compact per-algorithm summary for terminal and service output."""
    chosen = selected_estimates(result)
    rows = []
    for algorithm in result.plan.algorithms:
        cells = result.cells_for(algorithm)
        if not cells:
            continue
        finals = np.array([c.best_value for c in cells])
        pick = chosen[algorithm]
        rows.append(
            {
                "algorithm": algorithm,
                "deterministic": cells[0].deterministic,
                "replications": len(cells),
                "mean_final_Z": float(finals.mean()),
                "std_final_Z": float(finals.std()),
                "best_final_Z": float(pick.best_value),
                "best_theta": [float(x) for x in pick.best_theta],
            }
        )
    return rows
