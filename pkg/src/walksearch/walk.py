"""Building blocks of the coined walk and the baseline search iteration.

The walk alternates a Grover coin flip with a direction-conditioned moving
step on the torus; the search iterate additionally reflects the coin at the
marked site.  All operators here are matrix-free structured loops over the
(d, y, x) axes and mutate the passed state in place.  They broadcast over
any leading axes, so the controlled-walk module can apply them to a single
ancilla slab.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import ProblemInstance, Space, StateVector, make_uniform


def grover_coin_flip(slab: np.ndarray) -> None:
    """Reflection 2|u_c><u_c| - I on the coin axis: c_d -> sum(c)/2 - c_d."""
    total = slab.sum(axis=-3, keepdims=True)
    np.subtract(total * 0.5, slab, out=slab)


def moving_step(slab: np.ndarray) -> None:
    """Neighbor move with direction flip, periodic on the torus.

    right,(x,y) -> left,(x+1,y); left -> right,(x-1,y);
    up,(x,y) -> down,(x,y+1); down -> up,(x,y-1).
    """
    d0 = slab[..., 0, :, :].copy()
    slab[..., 0, :, :] = np.roll(slab[..., 1, :, :], -1, axis=-1)
    slab[..., 1, :, :] = np.roll(d0, 1, axis=-1)
    d2 = slab[..., 2, :, :].copy()
    slab[..., 2, :, :] = np.roll(slab[..., 3, :, :], -1, axis=-2)
    slab[..., 3, :, :] = np.roll(d2, 1, axis=-2)


def marked_coin_reflection(slab: np.ndarray, mx: int, my: int) -> None:
    """I - 2|u_c,m><u_c,m| : reflect the coin about u_c at site m only."""
    col = slab[..., :, my, mx]
    col -= col.sum(axis=-1, keepdims=True) * 0.5


def marked_coin_overlap(slab: np.ndarray, mx: int, my: int) -> complex:
    """<u_c, m | psi> for a (4,s,s) slab."""
    return complex(slab[..., :, my, mx].sum() * 0.5)


@dataclass
class ProbeLog:
    """Per-probe record of the evolution: step index, target overlap, site hit probability."""

    steps: np.ndarray
    overlap: np.ndarray
    marked_prob: np.ndarray

    def peak(self) -> tuple[int, float]:
        """(step, value) of the best probed marked-site probability."""
        i = int(np.argmax(self.marked_prob))
        return int(self.steps[i]), float(self.marked_prob[i])

    def peak_overlap(self) -> tuple[int, float]:
        """(step, |overlap|) at the best probed target overlap."""
        i = int(np.argmax(np.abs(self.overlap)))
        return int(self.steps[i]), float(abs(self.overlap[i]))


class WalkOps:
    """Walk, oracle reflection and search iterate for one problem instance.

    Immutable after construction; every ``apply_*`` mutates its argument
    in place and returns it.  The cost model charges one time step for the
    walk and one for the oracle reflection.
    """

    step_cost_model = {"walk": 1, "oracle_reflection": 1}

    def __init__(self, instance: ProblemInstance):
        self.instance = instance

    def _slab(self, state: StateVector) -> np.ndarray:
        if state.space is Space.LATTICE:
            raise ValueError("walk operators act on coin-carrying spaces")
        return state.view()

    def apply_shift(self, state: StateVector) -> StateVector:
        moving_step(self._slab(state))
        return state

    def apply_coin_flip(self, state: StateVector) -> StateVector:
        grover_coin_flip(self._slab(state))
        return state

    def apply_oracle_reflection(self, state: StateVector) -> StateVector:
        if state.space is not Space.JOINT:
            raise ValueError("oracle reflection lives in the joint space")
        mx, my = self.instance.marked
        marked_coin_reflection(state.view(), mx, my)
        return state

    def apply_walk(self, state: StateVector) -> StateVector:
        """W = (moving step) . (coin flip)."""
        slab = self._slab(state)
        grover_coin_flip(slab)
        moving_step(slab)
        return state

    def apply_search_iterate(self, state: StateVector) -> StateVector:
        """U_W: oracle reflection followed by the walk."""
        return self.apply_walk(self.apply_oracle_reflection(state))

    def apply_search_iterate_inverse(self, state: StateVector) -> StateVector:
        """U_W^-1: every factor is involutory, so apply them in reverse."""
        slab = self._slab(state)
        moving_step(slab)
        grover_coin_flip(slab)
        return self.apply_oracle_reflection(state)

    def target_overlap(self, state: StateVector) -> complex:
        mx, my = self.instance.marked
        return marked_coin_overlap(state.view(), mx, my)


def default_probe_stride(side: int, total_steps: int) -> int:
    """Every step up to side 32, coarser above to bound the log size."""
    if side <= 32:
        return 1
    return max(1, math.ceil(total_steps / 512))


def charged_time_steps(instance: ProblemInstance, iterations: int) -> int:
    """Time-step account: 2 per search iterate plus the 2*side setup credit."""
    return 2 * iterations + 2 * instance.side


def run_akr(
    instance: ProblemInstance,
    steps: int,
    probe_stride: int = 1,
    probe_at: set[int] | None = None,
) -> tuple[StateVector, ProbeLog]:
    """Iterate the search from the uniform joint state, probing as it goes.

    Probes happen every ``probe_stride`` steps, at any step listed in
    ``probe_at``, and always at step 0 and the final step.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    ops = WalkOps(instance)
    state = make_uniform(Space.JOINT, instance)
    mx, my = instance.marked
    extra = probe_at or set()
    rec_steps, rec_ov, rec_prob = [], [], []
    slab = state.view()
    for t in range(steps + 1):
        if t % probe_stride == 0 or t == steps or t in extra:
            rec_steps.append(t)
            rec_ov.append(marked_coin_overlap(slab, mx, my))
            rec_prob.append(float(np.sum(np.abs(slab[:, my, mx]) ** 2)))
        if t < steps:
            ops.apply_search_iterate(state)
    log = ProbeLog(np.array(rec_steps), np.array(rec_ov), np.array(rec_prob))
    return state, log
