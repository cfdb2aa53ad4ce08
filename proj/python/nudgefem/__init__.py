"""Nudged Navier-Stokes P2/P1 solver: Python front end to the C++ core."""

from ._core import (
    DimensionMismatchError,
    DivergenceError,
    Error,
    InitialCondition,
    InterpolantKind,
    InvalidConfigError,
    LagrangeMode,
    SimulationConfig,
    assemble_operators,
    asymptotic_max,
    eval_f,
    eval_p,
    eval_u,
    fit_decay_rate,
    fit_slope,
    predict_gamma,
    run_convergence,
    run_property_suite,
    simulate,
)

__all__ = [
    "DimensionMismatchError",
    "DivergenceError",
    "Error",
    "InitialCondition",
    "InterpolantKind",
    "InvalidConfigError",
    "LagrangeMode",
    "SimulationConfig",
    "assemble_operators",
    "asymptotic_max",
    "eval_f",
    "eval_p",
    "eval_u",
    "fit_decay_rate",
    "fit_slope",
    "predict_gamma",
    "run_convergence",
    "run_property_suite",
    "simulate",
]
