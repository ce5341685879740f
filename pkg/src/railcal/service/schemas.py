"""Request and response bodies of the HTTP service."""
from __future__ import annotations

from typing import Dict, List, Optional, Union

from pydantic import BaseModel, Field

from ..fixtures import DEMAND_SEED


class HealthResponse(BaseModel):
    status: str
    version: str
    algorithms: List[str]


class ScenarioInfo(BaseModel):
    name: str
    summary: str
    choice_coefs: List[float]
    capacity_coefs: List[float]


class FixtureRequest(BaseModel):
    out_dir: str
    demand_seed: int = DEMAND_SEED


class FixtureResponse(BaseModel):
    directory: str
    stations: int
    trains: int
    passengers: int
    od_pairs: int
    od_pairs_with_route_choice: int
    demand_seed: int


class GenerateRequest(BaseModel):
    out_dir: str
    input_dir: Optional[str] = None  # None: build the bundled fixture in place
    scenario: str = "reference"
    seed: int = 0
    demand_seed: int = DEMAND_SEED
    settings: Optional[Dict[str, Union[int, float]]] = None


class GenerateResponse(BaseModel):
    manifest: Dict[str, object]


class CalibrateRequest(BaseModel):
    dataset_dir: str
    algorithm: str = "cors"
    budget: int = Field(default=100, ge=1)
    replications: int = Field(default=5, ge=1)
    seed: int = 0
    workers: int = Field(default=1, ge=1)
    out_dir: Optional[str] = None
    sim_seed: Optional[int] = None


class CompareRequest(BaseModel):
    dataset_dir: str
    algorithms: Optional[List[str]] = None  # None: all algorithms
    budget: int = Field(default=100, ge=1)
    replications: int = Field(default=5, ge=1)
    seed: int = 0
    workers: int = Field(default=1, ge=1)
    out_dir: Optional[str] = None
    sim_seed: Optional[int] = None


class AlgorithmSummary(BaseModel):
    algorithm: str
    deterministic: bool
    replications: int
    mean_final_Z: float
    std_final_Z: float
    best_final_Z: float
    best_theta: List[float]


class ExperimentResponse(BaseModel):
    summary: List[AlgorithmSummary]
    theta_true: List[float]
    out_dir: Optional[str] = None
    manifest: Dict[str, object]


class ReportRequest(BaseModel):
    experiment_dir: str
    verify_digests: bool = True


class ReportResponse(BaseModel):
    summary: List[AlgorithmSummary]
    theta_true: List[float]
    digests_ok: Optional[bool] = None
    manifest: Dict[str, object]
