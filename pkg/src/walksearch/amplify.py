"""Amplitude amplification on top of the plain-walk preparation.

The T-step walk evolution leaves only a ~1/sqrt(ln N) amplitude on the
marked coin state, so the baseline pipeline wraps that evolution as a
state-preparation operator and amplifies the overlap to constant with the
usual pair of reflections.  The controlled pipeline never uses this module;
that is the whole point of the comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .lattice import ProblemInstance, Space, StateVector, inner, make_uniform
from .walk import WalkOps, charged_time_steps


@dataclass
class PreparationOperator:
    """Forward/backward evolution handles plus the time steps charged per pass.

    ``run()`` produces the prepared state from scratch; ``run(state)``
    applies the same forward evolution to an existing state.
    """

    run: Callable[..., StateVector]
    inverse_run: Callable[[StateVector], StateVector]
    cost_steps: int


def akr_preparation(instance: ProblemInstance, steps: int) -> PreparationOperator:
    """Preparation = uniform state followed by ``steps`` search iterates."""
    ops = WalkOps(instance)

    def run(state: StateVector | None = None) -> StateVector:
        if state is None:
            state = make_uniform(Space.JOINT, instance)
        for _ in range(steps):
            ops.apply_search_iterate(state)
        return state

    def inverse_run(state: StateVector) -> StateVector:
        for _ in range(steps):
            ops.apply_search_iterate_inverse(state)
        return state

    return PreparationOperator(
        run=run,
        inverse_run=inverse_run,
        cost_steps=charged_time_steps(instance, steps),
    )


@dataclass
class TargetSubspace:
    """Reflection about a target subspace plus the projection amplitude."""

    reflect: Callable[[StateVector], StateVector]
    amplitude: Callable[[StateVector], float]


def marked_coin_target(instance: ProblemInstance) -> TargetSubspace:
    """Rank-1 target |u_c, m>: its reflection is exactly the oracle reflection."""
    ops = WalkOps(instance)
    return TargetSubspace(
        reflect=ops.apply_oracle_reflection,
        amplitude=lambda state: abs(ops.target_overlap(state)),
    )


def _reflect_about_uniform(state: StateVector) -> StateVector:
    """2|Phi_0><Phi_0| - I for the uniform reference state."""
    state.amps[:] = 2.0 * state.amps.mean() - state.amps
    return state


def optimal_rounds(overlap_amplitude: float) -> int:
    """Round count putting (2r+1) arcsin(a) closest to pi/2, floored at 0."""
    if not 0.0 < overlap_amplitude <= 1.0:
        raise ValueError(f"overlap amplitude must be in (0, 1], got {overlap_amplitude}")
    theta = math.asin(overlap_amplitude)
    return max(0, int(round(math.pi / (4.0 * theta) - 0.5)))


def amplify(
    prep: PreparationOperator,
    target: TargetSubspace,
    rounds: int,
) -> tuple[StateVector, int]:
    """Iterate (reflect about prepared state) o (reflect about target).

    The prepared-state reflection is run o (reflect about uniform) o
    inverse_run, so each round charges two preparation passes plus one
    oracle step.  Returns the final state and the total steps charged.
    """
    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    state = prep.run()
    for _ in range(rounds):
        target.reflect(state)
        state = prep.inverse_run(state)
        _reflect_about_uniform(state)
        state = prep.run(state)
    total_cost = (2 * rounds + 1) * prep.cost_steps + rounds
    return state, total_cost
