"""HTTP service exposing fixture building, generation, and calibration.

The command-line tool talks to this app in process by default; `railcal
serve` runs the same app behind uvicorn for remote use. Domain errors
map to 400 responses, malformed bodies to 422, anything unexpected to
the framework's plain 500.
"""
from __future__ import annotations

import tempfile
from pathlib import Path
from typing import Dict, List

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, fileio
from ..config import resolve_settings
from ..fixtures import build_fixture
from ..harness import (
    ExperimentPlan,
    read_experiment_manifest,
    run_and_report,
    run_experiment,
    report as write_report,
    summary_rows,
)
from ..model import RailcalError
from ..optim import ALGORITHMS
from ..synth import generate_dataset, scenario_table
from . import schemas


def _experiment_summary(manifest: Dict[str, object]) -> List[schemas.AlgorithmSummary]:
    """Per-algorithm digest computed from the cells stored in a manifest."""
    by_alg: Dict[str, List[Dict[str, object]]] = {}
    for cell in manifest.get("cells", []):
        by_alg.setdefault(str(cell["algorithm"]), []).append(cell)
    rows = []
    for algorithm in manifest["plan"]["algorithms"]:
        cells = by_alg.get(algorithm)
        if not cells:
            continue
        finals = np.array([float(c["best_value"]) for c in cells])
        pick = min(cells, key=lambda c: (float(c["best_value"]), int(c["replication"])))
        rows.append(
            schemas.AlgorithmSummary(
                algorithm=algorithm,
                deterministic=bool(cells[0]["deterministic"]),
                replications=len(cells),
                mean_final_Z=float(finals.mean()),
                std_final_Z=float(finals.std()),
                best_final_Z=float(pick["best_value"]),
                best_theta=[float(x) for x in pick["best_theta"]],
            )
        )
    return rows


def _run_plan(plan: ExperimentPlan, out_dir) -> schemas.ExperimentResponse:
    if out_dir is not None:
        result, manifest = run_and_report(plan, out_dir)
    else:
        result = run_experiment(plan)
        with tempfile.TemporaryDirectory() as tmp:
            manifest = write_report(result, tmp)
            manifest["digests"] = {}  # files were not kept
    return schemas.ExperimentResponse(
        summary=[schemas.AlgorithmSummary(**row) for row in summary_rows(result)],
        theta_true=[float(x) for x in result.dataset_manifest["theta_true"]],
        out_dir=out_dir,
        manifest=manifest,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="railcal", version=__version__)

    @app.exception_handler(RailcalError)
    async def _domain_error(request: Request, exc: RailcalError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(
            status="ok", version=__version__, algorithms=list(ALGORITHMS)
        )

    @app.get("/scenarios", response_model=List[schemas.ScenarioInfo])
    def scenarios() -> List[schemas.ScenarioInfo]:
        return [schemas.ScenarioInfo(**row) for row in scenario_table()]

    @app.post("/fixture", response_model=schemas.FixtureResponse)
    def fixture(req: schemas.FixtureRequest) -> schemas.FixtureResponse:
        return schemas.FixtureResponse(**build_fixture(req.out_dir, req.demand_seed))

    @app.post("/generate", response_model=schemas.GenerateResponse)
    def generate(req: schemas.GenerateRequest) -> schemas.GenerateResponse:
        input_dir = req.input_dir
        if input_dir is None:
            build_fixture(req.out_dir, req.demand_seed)
            input_dir = req.out_dir
        settings = resolve_settings(req.settings) if req.settings else None
        manifest = generate_dataset(
            input_dir, req.out_dir, scenario=req.scenario, seed=req.seed, settings=settings
        )
        return schemas.GenerateResponse(manifest=manifest)

    @app.post("/calibrate", response_model=schemas.ExperimentResponse)
    def calibrate(req: schemas.CalibrateRequest) -> schemas.ExperimentResponse:
        plan = ExperimentPlan(
            dataset_dir=req.dataset_dir,
            algorithms=(req.algorithm,),
            budget=req.budget,
            replications=req.replications,
            base_seed=req.seed,
            workers=req.workers,
            sim_seed=req.sim_seed,
        )
        return _run_plan(plan, req.out_dir)

    @app.post("/compare", response_model=schemas.ExperimentResponse)
    def compare(req: schemas.CompareRequest) -> schemas.ExperimentResponse:
        algorithms = tuple(req.algorithms) if req.algorithms else ALGORITHMS
        plan = ExperimentPlan(
            dataset_dir=req.dataset_dir,
            algorithms=algorithms,
            budget=req.budget,
            replications=req.replications,
            base_seed=req.seed,
            workers=req.workers,
            sim_seed=req.sim_seed,
        )
        return _run_plan(plan, req.out_dir)

    @app.post("/report", response_model=schemas.ReportResponse)
    def report(req: schemas.ReportRequest) -> schemas.ReportResponse:
        manifest = read_experiment_manifest(req.experiment_dir)
        digests_ok = None
        if req.verify_digests and manifest.get("digests"):
            digests_ok = all(
                Path(req.experiment_dir, name).exists()
                and fileio.sha256_file(str(Path(req.experiment_dir, name))) == digest
                for name, digest in manifest["digests"].items()
            )
        return schemas.ReportResponse(
            summary=_experiment_summary(manifest),
            theta_true=[float(x) for x in manifest["dataset"]["theta_true"]],
            digests_ok=digests_ok,
            manifest=manifest,
        )

    return app
