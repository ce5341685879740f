"""Schedule-based transit loading and black-box calibration toolkit."""

__version__ = "0.1.0"

from .capacity import CapacityParams, boarding_allowance, effective_capacity
from .choice import ChoiceParams, ChoiceTable, choice_probabilities
from .config import RunSettings, parse_config_file, resolve_settings
from .fixtures import build_fixture
from .metrics import (
    CalibrationTarget,
    FitEvaluator,
    ObjectiveWeights,
    PARAM_NAMES,
    kl_divergence,
    objective_value,
)
from .model import (
    NetworkModel,
    Passenger,
    Path,
    RailcalError,
    Station,
    TimeGrid,
    TrainEvent,
)
from .optim import ALGORITHMS, OptimizerConfig, OptimizeResult, optimize
from .sim import SimCase, SimResult, run_simulation
from .synth import SCENARIOS, generate_dataset, load_target, theta_start
from .harness import ExperimentPlan, report, run_experiment

__all__ = [
    "ALGORITHMS",
    "CalibrationTarget",
    "CapacityParams",
    "ChoiceParams",
    "ChoiceTable",
    "ExperimentPlan",
    "FitEvaluator",
    "NetworkModel",
    "ObjectiveWeights",
    "OptimizeResult",
    "OptimizerConfig",
    "PARAM_NAMES",
    "Passenger",
    "Path",
    "RailcalError",
    "RunSettings",
    "SCENARIOS",
    "SimCase",
    "SimResult",
    "Station",
    "TimeGrid",
    "TrainEvent",
    "boarding_allowance",
    "build_fixture",
    "choice_probabilities",
    "effective_capacity",
    "generate_dataset",
    "kl_divergence",
    "load_target",
    "objective_value",
    "optimize",
    "parse_config_file",
    "report",
    "resolve_settings",
    "run_experiment",
    "run_simulation",
    "theta_start",
    "__version__",
]
