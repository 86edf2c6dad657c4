"""Shared-control takeover: a two-player LQ differential game with
time-varying authority weights, plus transition-strategy comparison tools."""

from .driver import DriverProfile, DrivingLog, estimate_q, sample_profiles, synth_driver_log
from .errors import ConfigError, DivergenceError, EstimationError
from .game import GameWeights, RiccatiSolution, cost_of_run, solve_coupled_riccati
from .metrics import ComparisonTable, ErrorReport, batch_norms, compare_strategies, cumulative_error
from .scenario import Scenario, build_scenario, reference_state
from .sim import AdasWeights, RunConfig, RunLog, run_batch, run_takeover
from .transition import ErrorSignals, TransitionSpec, alpha, blend_weights
from .vehicle import (
    DiscreteModel,
    LinearModel,
    VehicleParams,
    build_system_matrices,
    discretize,
    step_dynamics,
)

__version__ = "0.1.0"

__all__ = [
    "AdasWeights",
    "ComparisonTable",
    "ConfigError",
    "DiscreteModel",
    "DivergenceError",
    "DriverProfile",
    "DrivingLog",
    "ErrorReport",
    "ErrorSignals",
    "EstimationError",
    "GameWeights",
    "LinearModel",
    "RiccatiSolution",
    "RunConfig",
    "RunLog",
    "Scenario",
    "TransitionSpec",
    "VehicleParams",
    "alpha",
    "batch_norms",
    "blend_weights",
    "build_scenario",
    "build_system_matrices",
    "compare_strategies",
    "cost_of_run",
    "cumulative_error",
    "discretize",
    "estimate_q",
    "reference_state",
    "run_batch",
    "run_takeover",
    "sample_profiles",
    "solve_coupled_riccati",
    "step_dynamics",
    "synth_driver_log",
]
