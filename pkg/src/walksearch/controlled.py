"""Ancilla-controlled walk: the variant that reaches the marked site directly.

An ancilla qubit gates both the walk and the oracle reflection.  Conjugating
the controlled reflection with a small rotation X_delta of the ancilla tilts
the effective target state, which deliberately enlarges its projection on
the -1 eigenspace of the controlled walk.  With cos(delta) ~ 1/sqrt(ln N)
the final state overlaps the marked site at constant order, so no
amplitude-amplification rounds are needed afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import ProblemInstance, Space, StateVector, make_uniform
from .walk import ProbeLog, grover_coin_flip, marked_coin_reflection, moving_step


@dataclass(frozen=True)
class ControlConfig:
    """Ancilla rotation angle with cached trig, plus its tuning constant.

    When built by :func:`tuned_delta` the angle follows
    cos(delta) = c_delta / sqrt(ln N).
    """

    delta: float
    c_delta: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.delta < math.pi / 2:
            raise ValueError(f"delta must lie in [0, pi/2), got {self.delta}")
        object.__setattr__(self, "cos_delta", math.cos(self.delta))
        object.__setattr__(self, "sin_delta", math.sin(self.delta))


def tuned_delta(instance: ProblemInstance, c_delta: float = 1.0) -> ControlConfig:
    """Angle from the tuning rule cos(delta) = c_delta / sqrt(ln N)."""
    cos_d = c_delta / math.sqrt(math.log(instance.n_sites))
    if cos_d > 1.0:
        raise ValueError(
            f"c_delta={c_delta} too large for N={instance.n_sites}: cos(delta) would exceed 1"
        )
    return ControlConfig(delta=math.acos(cos_d), c_delta=c_delta)


def _require_controlled(state: StateVector) -> np.ndarray:
    if state.space is not Space.CONTROLLED:
        raise ValueError("operation requires the controlled (ancilla) space")
    return state.view()


class ControlledWalkOps:
    """The five gates of the controlled search iterate, in-place on 8N states."""

    def __init__(self, instance: ProblemInstance, config: ControlConfig):
        self.instance = instance
        self.config = config

    def apply_x_delta(self, state: StateVector, dagger: bool = False) -> StateVector:
        """Rotate each (b=0, b=1) amplitude pair by X_delta (or its transpose)."""
        v = _require_controlled(state)
        c, s = self.config.cos_delta, self.config.sin_delta
        if dagger:
            s = -s
        b0 = c * v[0] + s * v[1]
        v[1] = -s * v[0] + c * v[1]
        v[0] = b0
        return state

    def apply_z_bar(self, state: StateVector) -> StateVector:
        """Negate every amplitude with ancilla bit 0."""
        v = _require_controlled(state)
        v[0] = -v[0]
        return state

    def apply_controlled_reflection(self, state: StateVector) -> StateVector:
        """Oracle reflection on the joint factor, only inside the b=1 sector."""
        v = _require_controlled(state)
        mx, my = self.instance.marked
        marked_coin_reflection(v[1], mx, my)
        return state

    def apply_controlled_walk(self, state: StateVector) -> StateVector:
        """Walk on the joint factor iff the ancilla is |1>."""
        v = _require_controlled(state)
        grover_coin_flip(v[1])
        moving_step(v[1])
        return state

    def apply_search_iterate(self, state: StateVector) -> StateVector:
        """U_C: X_delta, controlled reflection, X_delta^dag, controlled walk, Z-bar."""
        self.apply_x_delta(state)
        self.apply_controlled_reflection(state)
        self.apply_x_delta(state, dagger=True)
        self.apply_controlled_walk(state)
        self.apply_z_bar(state)
        return state

    def target_overlap(self, state: StateVector) -> complex:
        """<delta_1, u_c, m | psi> with |delta_1> = -sin(d)|0> + cos(d)|1>."""
        v = _require_controlled(state)
        mx, my = self.instance.marked
        c, s = self.config.cos_delta, self.config.sin_delta
        return complex(0.5 * (-s * v[0, :, my, mx].sum() + c * v[1, :, my, mx].sum()))


def run_controlled(
    instance: ProblemInstance,
    config: ControlConfig,
    steps: int,
    probe_stride: int = 1,
    probe_at: set[int] | None = None,
) -> tuple[StateVector, ProbeLog]:
    """Iterate the controlled search from |1>|u_c>|u_N>, probing as it goes."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    ops = ControlledWalkOps(instance, config)
    state = make_uniform(Space.CONTROLLED, instance)
    mx, my = instance.marked
    extra = probe_at or set()
    rec_steps, rec_ov, rec_prob = [], [], []
    v = state.view()
    for t in range(steps + 1):
        if t % probe_stride == 0 or t == steps or t in extra:
            rec_steps.append(t)
            rec_ov.append(ops.target_overlap(state))
            rec_prob.append(float(np.sum(np.abs(v[:, :, my, mx]) ** 2)))
        if t < steps:
            ops.apply_search_iterate(state)
    log = ProbeLog(np.array(rec_steps), np.array(rec_ov), np.array(rec_prob))
    return state, log
