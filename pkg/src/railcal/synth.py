"""Synthetic-truth scenarios and dataset generation.

A scenario fixes the full parameter vector used to simulate "observed"
smart-card records. Calibration then starts from the search-box midpoint
and tries to recover that vector from the records alone. Because the
simulator is seeded, re-running it at the true vector with the dataset
seed reproduces the observations exactly and the fit measure is zero.
"""
from __future__ import annotations

import json
import shutil
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import fileio
from .config import CONFIG_FILE, RunSettings, parse_config_file, resolve_settings
from .metrics import (
    CalibrationTarget,
    N_PARAMS,
    exit_flows,
    journey_samples,
    observed_from_records,
    split_theta,
)
from .model import DatasetError, Passenger
from .sim import SimCase, run_simulation, write_passenger_outcomes, write_train_calls

MANIFEST_FILE = "manifest.json"
DATASET_KIND = "railcal-dataset"

REFERENCE_CHOICE = (-0.147, -1.271, -0.573, -3.679)
REFERENCE_CAPACITY = (232.0, 0.0732, 0.0607)

BOUNDS_LOWER = (-2.0, -5.0, -3.0, -10.0, 220.0, 0.0, 0.0)
BOUNDS_UPPER = (0.0, 0.0, 0.0, 0.0, 260.0, 0.2, 0.2)


@dataclass(frozen=True)
class Scenario:
    """A named ground-truth parameter vector for synthetic data."""

    name: str
    summary: str
    choice_coefs: Tuple[float, float, float, float]
    capacity_coefs: Tuple[float, float, float]

    def theta_true(self) -> np.ndarray:
        return np.array(self.choice_coefs + self.capacity_coefs, dtype=float)


SCENARIOS: Dict[str, Scenario] = {
    s.name: s
    for s in (
        Scenario(
            "reference",
            "moderate taste coefficients, mild crowding response",
            REFERENCE_CHOICE,
            REFERENCE_CAPACITY,
        ),
        Scenario(
            "random_choice",
            "indifferent travellers: every path in a set is equally likely",
            (0.0, 0.0, 0.0, 0.0),
            REFERENCE_CAPACITY,
        ),
        Scenario(
            "deterministic_choice",
            "extreme taste coefficients: the best path takes nearly all flow",
            (-2.0, -5.0, -3.0, -10.0),
            REFERENCE_CAPACITY,
        ),
        Scenario(
            "crowding_sensitive",
            "strong dependence of boarding limits on crowding",
            REFERENCE_CHOICE,
            (225.0, 0.2, 0.2),
        ),
        Scenario(
            "crowding_insensitive",
            "boarding limits ignore crowding entirely",
            REFERENCE_CHOICE,
            (235.0, 0.0, 0.0),
        ),
    )
}


def theta_start() -> np.ndarray:
    """Search start: the midpoint of the parameter box."""
    lo = np.array(BOUNDS_LOWER)
    hi = np.array(BOUNDS_UPPER)
    return (lo + hi) / 2.0


def _dataset_files(directory: Path) -> Dict[str, Path]:
    names = fileio.dataset_paths(str(directory))
    return {key: Path(p) for key, p in names.items()}


def _load_case(directory: Path, settings: RunSettings) -> SimCase:
    files = _dataset_files(directory)
    network = fileio.load_network(str(files["network"]), str(files["paths"]))
    events = fileio.read_timetable(str(files["timetable"]))
    passengers = fileio.read_afc(str(files["demand"]))
    return SimCase(network, events, passengers, settings.grid())


def generate_dataset(
    input_dir: str,
    out_dir: str,
    scenario: str = "reference",
    seed: int = 0,
    settings: Optional[RunSettings] = None,
) -> Dict[str, object]:
    """Simulate a scenario and write a self-contained dataset directory.

    The inputs (network, paths, timetable, demand) are copied verbatim so
    the dataset stands alone; the simulated records land in afc.csv and
    manifest.json pins the scenario, seed, settings, and file digests.
    Returns the manifest as a dict.
    """
    if scenario not in SCENARIOS:
        raise DatasetError(
            f"unknown scenario {scenario!r}; choose from {sorted(SCENARIOS)}"
        )
    src = Path(input_dir)
    dst = Path(out_dir)
    if settings is None:
        cfg = src / CONFIG_FILE
        settings = resolve_settings(parse_config_file(str(cfg)) if cfg.exists() else None)

    case = _load_case(src, settings)
    theta = SCENARIOS[scenario].theta_true()
    choice_params, capacity_params = split_theta(
        theta, scale=settings.choice_scale, overlap_decay=settings.overlap_decay
    )
    result = run_simulation(case, choice_params, capacity_params, seed=seed)

    dst.mkdir(parents=True, exist_ok=True)
    if src.resolve() != dst.resolve():
        for name in ("network", "paths", "timetable", "demand"):
            shutil.copyfile(_dataset_files(src)[name], _dataset_files(dst)[name])

    observed: List[Passenger] = []
    for i, pax in enumerate(case.passengers()):
        if result.tap_out[i] >= 0:
            observed.append(
                Passenger(pax.pax_id, pax.origin, pax.tap_in_s, pax.dest, int(result.tap_out[i]))
            )
    afc_path = _dataset_files(dst)["afc"]
    fileio.write_afc(observed, str(afc_path))
    write_passenger_outcomes(result, str(dst / "passengers.csv"))
    write_train_calls(result, str(dst / "train_calls.csv"))

    digests = dataset_digests(str(dst))
    manifest: Dict[str, object] = {
        "kind": DATASET_KIND,
        "scenario": scenario,
        "seed": seed,
        "theta_true": [float(v) for v in theta],
        "bounds": {"lower": list(BOUNDS_LOWER), "upper": list(BOUNDS_UPPER)},
        "settings": settings.as_dict(),
        "counts": {
            "demand": result.counts.total,
            "served": result.counts.exited,
            "unserved": result.counts.unserved,
        },
        "digests": digests,
    }
    with open(dst / MANIFEST_FILE, "w", encoding="utf-8", newline="") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return manifest


def read_manifest(dataset_dir: str) -> Dict[str, object]:
    path = Path(dataset_dir) / MANIFEST_FILE
    if not path.exists():
        raise DatasetError(
            f"{path} not found: {dataset_dir!r} is not a generated dataset "
            "(create one with `railcal generate`)"
        )
    with open(path, "r", encoding="utf-8") as f:
        manifest = json.load(f)
    if manifest.get("kind") != DATASET_KIND:
        raise DatasetError(f"{path}: unexpected manifest kind {manifest.get('kind')!r}")
    return manifest


def load_target(
    dataset_dir: str, sim_seed: Optional[int] = None
) -> Tuple[CalibrationTarget, Dict[str, object]]:
    """Build the calibration problem a dataset directory describes.

    The simulation seed defaults to the generation seed so the fit
    measure uses common random numbers with the recorded observations;
    pass sim_seed to decouple them.
    """
    manifest = read_manifest(dataset_dir)
    settings = resolve_settings(manifest["settings"])
    directory = Path(dataset_dir)
    case = _load_case(directory, settings)

    observed = fileio.read_afc(str(directory / fileio.AFC_FILE))
    flows, samples = observed_from_records(observed, settings.grid())

    theta_true = np.asarray(manifest["theta_true"], dtype=float)
    if theta_true.shape != (N_PARAMS,):
        raise DatasetError(f"manifest theta_true has shape {theta_true.shape}")
    target = CalibrationTarget(
        case=case,
        observed_flows=flows,
        observed_samples=samples,
        lower=np.asarray(manifest["bounds"]["lower"], dtype=float),
        upper=np.asarray(manifest["bounds"]["upper"], dtype=float),
        seed=int(manifest["seed"]) if sim_seed is None else int(sim_seed),
        weights=settings.weights(),
        choice_scale=settings.choice_scale,
        overlap_decay=settings.overlap_decay,
    )
    return target, manifest


def simulated_observations(target: CalibrationTarget, theta: np.ndarray):
    """Exit flows and journey-time samples the model produces at theta."""
    choice_params, capacity_params = target.split(np.asarray(theta, dtype=float))
    result = run_simulation(target.case, choice_params, capacity_params, seed=target.seed)
    grid = target.case.grid
    return exit_flows(result, grid), journey_samples(result, grid), result


def scenario_table() -> List[Dict[str, object]]:
    """Stable listing of the built-in scenarios for CLIs and services."""
    rows = []
    for name in sorted(SCENARIOS):
        s = SCENARIOS[name]
        rows.append(
            {
                "name": s.name,
                "summary": s.summary,
                "choice_coefs": list(s.choice_coefs),
                "capacity_coefs": list(s.capacity_coefs),
            }
        )
    return rows


def dataset_digests(dataset_dir: str) -> Dict[str, str]:
    """Fresh digests of the five dataset files, keyed by file name."""
    files = _dataset_files(Path(dataset_dir))
    return {p.name: fileio.sha256_file(str(p)) for p in sorted(files.values())}
