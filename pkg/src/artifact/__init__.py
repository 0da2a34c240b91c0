"""Simulation of the 1D individual-clustering model (parabolic density, elliptic velocity)."""

from .model import (
    POSITIVITY_TOL,
    Bistable,
    Custom,
    Grid,
    ModelParams,
    Monostable,
    ParameterError,
    SimState,
    SolverAbort,
    evaluate_E,
    evaluate_E_prime,
    validate_params,
)
from .stepper import StepperConfig, run, step

__all__ = [
    "POSITIVITY_TOL", "Bistable", "Custom", "Grid", "ModelParams", "Monostable",
    "ParameterError", "SimState", "SolverAbort", "StepperConfig", "evaluate_E",
    "evaluate_E_prime", "run", "step", "validate_params",
]
