"""Register layout, amplitude storage and measurement statistics.

Three register shapes are used throughout:

* ``lattice``    -- N site amplitudes on the sqrt(N) x sqrt(N) torus,
* ``joint``      -- 4N amplitudes, a 4-dim direction coin attached to every site,
* ``controlled`` -- 8N amplitudes, an extra ancilla qubit in front.

Basis index convention (x fastest, so an x-shift is a contiguous-stride move):
``index = (b * 4 + d) * N + y * side + x`` for the controlled space and
``index = d * N + y * side + x`` for the joint space, with coin directions
``d = 0..3`` meaning right, left, up, down.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

N_DIRS = 4  # right, left, up, down


class Space(enum.Enum):
    LATTICE = "lattice"
    JOINT = "joint"
    CONTROLLED = "controlled"


@dataclass(frozen=True)
class ProblemInstance:
    """A search instance: torus side length and the single marked site."""

    side: int
    marked: tuple[int, int] = (0, 0)

    def __post_init__(self) -> None:
        if self.side < 2 or self.side % 2 != 0:
            raise ValueError(f"side must be even and >= 2, got {self.side}")
        mx, my = self.marked
        if not (0 <= mx < self.side and 0 <= my < self.side):
            raise ValueError(f"marked site {self.marked} outside {self.side}x{self.side} lattice")

    @property
    def n_sites(self) -> int:
        return self.side * self.side

    @property
    def marked_index(self) -> int:
        mx, my = self.marked
        return my * self.side + mx


def space_dim(space: Space, instance: ProblemInstance) -> int:
    n = instance.n_sites
    return {Space.LATTICE: n, Space.JOINT: 4 * n, Space.CONTROLLED: 8 * n}[space]


@dataclass
class StateVector:
    """Flat complex amplitude array over one of the three register shapes."""

    space: Space
    side: int
    amps: np.ndarray

    @property
    def dim(self) -> int:
        return self.amps.size

    def view(self) -> np.ndarray:
        """Structured view: (s,s) lattice, (4,s,s) joint, (2,4,s,s) controlled.

        Axes are (..., d, y, x); the view shares memory with ``amps``.
        """
        s = self.side
        shape = {
            Space.LATTICE: (s, s),
            Space.JOINT: (N_DIRS, s, s),
            Space.CONTROLLED: (2, N_DIRS, s, s),
        }[self.space]
        return self.amps.reshape(shape)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "StateVector":
        return StateVector(self.space, self.side, self.amps.copy())


@dataclass
class MeasurementDistribution:
    """Site probabilities with ancilla and coin traced out."""

    side: int
    probs: np.ndarray

    def marked_probability(self, instance: ProblemInstance) -> float:
        return float(self.probs[instance.marked_index])


def encode_index(b: int, d: int, x: int, y: int, side: int) -> int:
    """Controlled-space basis index of |b, d, x, y>."""
    return (b * N_DIRS + d) * side * side + y * side + x


def decode_index(index: int, side: int) -> tuple[int, int, int, int]:
    """Inverse of :func:`encode_index`; returns (b, d, x, y)."""
    n = side * side
    bd, site = divmod(index, n)
    b, d = divmod(bd, N_DIRS)
    y, x = divmod(site, side)
    return b, d, x, y


def make_uniform(space: Space, instance: ProblemInstance) -> StateVector:
    """Starting state of the search: uniform over coin and lattice.

    In the controlled space the ancilla starts in |1>, so only the b=1
    half carries amplitude.
    """
    n = instance.n_sites
    dim = space_dim(space, instance)
    amps = np.zeros(dim, dtype=np.complex128)
    if space is Space.LATTICE:
        amps[:] = 1.0 / math.sqrt(n)
    elif space is Space.JOINT:
        amps[:] = 1.0 / math.sqrt(4 * n)
    else:
        amps[4 * n:] = 1.0 / math.sqrt(4 * n)
    return StateVector(space, instance.side, amps)


def basis_state(space: Space, instance: ProblemInstance, index: int) -> StateVector:
    amps = np.zeros(space_dim(space, instance), dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(space, instance.side, amps)


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.space is not b.space or a.side != b.side:
        raise ValueError(f"inner product between {a.space.value} and {b.space.value} spaces")
    return complex(np.vdot(a.amps, b.amps))


def site_distribution(state: StateVector) -> MeasurementDistribution:
    """Probability of each lattice site, summing |amp|^2 over ancilla and coin."""
    s = state.side
    v = state.view()
    if state.space is Space.LATTICE:
        probs = np.abs(v) ** 2
    else:
        probs = np.sum(np.abs(v.reshape(-1, s, s)) ** 2, axis=0)
    return MeasurementDistribution(s, probs.reshape(-1))
