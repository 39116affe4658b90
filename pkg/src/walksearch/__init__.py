"""Coined quantum-walk spatial search on the torus.

State-vector simulation of the plain and ancilla-controlled walk search,
spectral predictions from the secular equation, amplitude amplification for
the baseline pipeline, and a benchmark harness for the scaling comparison.
"""

from .lattice import (
    MeasurementDistribution,
    ProblemInstance,
    Space,
    StateVector,
    basis_state,
    inner,
    make_uniform,
    site_distribution,
)
from .walk import ProbeLog, WalkOps, charged_time_steps, run_akr
from .controlled import ControlConfig, ControlledWalkOps, run_controlled, tuned_delta
from .spectral import (
    MomentumBlock,
    SecularSolution,
    SpectralExpansion,
    build_blocks,
    dense_oracle,
    expand_target,
    f_lambda,
    secular_residual,
    solve_alpha,
)
from .amplify import PreparationOperator, akr_preparation, amplify, marked_coin_target, optimal_rounds
from .bench import ExperimentRecord, ExperimentSpec, run_experiment, scaling_report

__all__ = [
    "ControlConfig",
    "ControlledWalkOps",
    "ExperimentRecord",
    "ExperimentSpec",
    "MeasurementDistribution",
    "MomentumBlock",
    "PreparationOperator",
    "ProbeLog",
    "ProblemInstance",
    "SecularSolution",
    "Space",
    "SpectralExpansion",
    "StateVector",
    "WalkOps",
    "akr_preparation",
    "amplify",
    "basis_state",
    "build_blocks",
    "charged_time_steps",
    "dense_oracle",
    "expand_target",
    "f_lambda",
    "inner",
    "make_uniform",
    "marked_coin_target",
    "optimal_rounds",
    "run_akr",
    "run_controlled",
    "run_experiment",
    "scaling_report",
    "secular_residual",
    "site_distribution",
    "solve_alpha",
    "tuned_delta",
]
