"""Eigenstructure of the walk and closed-form predictions for the search.

The walk block-diagonalizes over torus momenta (p, q): each sector is a
4x4 coin matrix with eigenvalues {1, -1, e^{+i theta}, e^{-i theta}} and
cos(theta) = (cos(2 pi p / side) + cos(2 pi q / side)) / 2.  Expanding the
target state in this eigenbasis reduces the search iterate to a scalar
secular equation whose smallest positive root alpha is the principal
eigenphase; the same expansion yields exact finite-sum predictions for the
initial- and final-state overlaps.  A dense eigendecomposition oracle for
small lattices cross-checks all of it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .controlled import ControlConfig, ControlledWalkOps
from .lattice import ProblemInstance, Space, StateVector, space_dim
from .walk import WalkOps, grover_coin_flip, moving_step

UC4 = np.full(4, 0.5)  # uniform coin state
DENSE_SIDE_CAP = 8
DEGENERATE_TOL = 1e-9


class SecularBracketError(RuntimeError):
    """Raised when the secular residual does not change sign inside the bracket."""

    def __init__(self, message: str, scan: list[tuple[float, float]]):
        super().__init__(message + "; scan (lambda, residual): " + repr(scan[:8]))
        self.scan = scan


# ---------------------------------------------------------------------------
# momentum blocks


def momentum_vector(p: int, side: int) -> np.ndarray:
    """1D Fourier vector chi_p with components e^{2 pi i p x / side} / sqrt(side)."""
    return np.exp(2j * np.pi * p * np.arange(side) / side) / math.sqrt(side)


def coin_block_matrix(p: int, q: int, side: int) -> np.ndarray:
    """4x4 matrix of the walk restricted to the (p, q) momentum sector."""
    wp = cmath.exp(2j * math.pi * p / side)
    wq = cmath.exp(2j * math.pi * q / side)
    shift = np.zeros((4, 4), dtype=np.complex128)
    shift[1, 0] = wp.conjugate()
    shift[0, 1] = wp
    shift[3, 2] = wq.conjugate()
    shift[2, 3] = wq
    coin = np.full((4, 4), 0.5) - np.eye(4)
    return shift @ coin


@dataclass
class MomentumBlock:
    """One (p, q) sector: eigenphase theta and the four coin eigenvectors.

    ``vec_plus`` / ``vec_minus`` carry eigenvalues e^{+/- i theta}; their
    phases are fixed so the target overlaps ``a_plus`` / ``a_minus`` are
    real and non-negative.  ``vec_one`` / ``vec_minus_one`` carry the
    trivial +1 / -1 eigenvalues and are orthogonal to the uniform coin
    for every sector except (0, 0).
    """

    p: int
    q: int
    theta: float
    vec_one: np.ndarray
    vec_minus_one: np.ndarray
    vec_plus: np.ndarray
    vec_minus: np.ndarray
    a_plus: float
    a_minus: float

    @property
    def coin_eigvecs(self) -> np.ndarray:
        """Columns (|+1>, |-1>, |e^{+i theta}>, |e^{-i theta}>)."""
        return np.column_stack([self.vec_one, self.vec_minus_one, self.vec_plus, self.vec_minus])

    def eigenvalues(self) -> np.ndarray:
        return np.array(
            [1.0, -1.0, cmath.exp(1j * self.theta), cmath.exp(-1j * self.theta)],
            dtype=np.complex128,
        )


def block_theta(p: int, q: int, side: int) -> float:
    ct = 0.5 * (math.cos(2 * math.pi * p / side) + math.cos(2 * math.pi * q / side))
    return math.acos(max(-1.0, min(1.0, ct)))


def _lattice_bra_phase(p: int, q: int, instance: ProblemInstance) -> complex:
    """conj(chi_p[mx] * chi_q[my]) -- the lattice factor of <Phi_pq|u_c, m>."""
    mx, my = instance.marked
    s = instance.side
    return cmath.exp(-2j * math.pi * (p * mx + q * my) / s) / s


def build_blocks(instance: ProblemInstance) -> list[MomentumBlock]:
    """Diagonalize every momentum sector, in lexicographic (p, q) order.

    Degenerate sectors get deterministic analytic eigenvectors: at (0, 0)
    the distinguished +1 vector is the uniform coin; at (side/2, side/2)
    the -1 eigenspace is three-dimensional and the conjugate pair is chosen
    as (u_c -/+ i r)/sqrt(2) with a fixed real r orthogonal to u_c, so the
    pair both spans the uniform coin (the search subspace must close) and
    keeps |a_plus| = |a_minus| = 1/sqrt(2N).
    """
    s = instance.side
    blocks: list[MomentumBlock] = []
    half = s // 2
    r_vec = np.array([1.0, -1.0, 0.0, 0.0]) / math.sqrt(2.0)
    t_vec = np.array([0.0, 0.0, 1.0, -1.0]) / math.sqrt(2.0)
    pm_vec = np.array([1.0, 1.0, -1.0, -1.0]) / 2.0
    for p in range(s):
        for q in range(s):
            lat = _lattice_bra_phase(p, q, instance)
            theta = block_theta(p, q, s)
            if (p, q) == (0, 0):
                blocks.append(
                    MomentumBlock(
                        p, q, 0.0,
                        vec_one=UC4.astype(np.complex128),
                        vec_minus_one=pm_vec.astype(np.complex128),
                        vec_plus=r_vec.astype(np.complex128),
                        vec_minus=t_vec.astype(np.complex128),
                        a_plus=0.0, a_minus=0.0,
                    )
                )
                continue
            if (p, q) == (half, half):
                vp = (UC4 - 1j * r_vec) / math.sqrt(2.0)
                vm = (UC4 + 1j * r_vec) / math.sqrt(2.0)
                ov = np.vdot(vp, UC4) * lat
                phase = ov / abs(ov)
                vp = vp * phase
                vm = vm * phase.conjugate()  # stays the conjugate pair
                blocks.append(
                    MomentumBlock(
                        p, q, math.pi,
                        vec_one=pm_vec.astype(np.complex128),
                        vec_minus_one=t_vec.astype(np.complex128),
                        vec_plus=vp, vec_minus=vm,
                        a_plus=float((np.vdot(vp, UC4) * lat).real),
                        a_minus=float((np.vdot(vm, UC4) * lat).real),
                    )
                )
                continue
            evals, evecs = np.linalg.eig(coin_block_matrix(p, q, s))
            i_one = int(np.argmin(np.abs(evals - 1.0)))
            i_mone = int(np.argmin(np.abs(evals + 1.0)))
            rest = [i for i in range(4) if i not in (i_one, i_mone)]
            i_plus, i_minus = (rest if evals[rest[0]].imag > 0 else rest[::-1])
            vp = evecs[:, i_plus].copy()
            vm = evecs[:, i_minus].copy()
            for v in (vp, vm):
                ov = np.vdot(v, UC4) * lat
                v *= ov / abs(ov)
            blocks.append(
                MomentumBlock(
                    p, q, abs(float(np.angle(evals[i_plus]))),
                    vec_one=evecs[:, i_one],
                    vec_minus_one=evecs[:, i_mone],
                    vec_plus=vp, vec_minus=vm,
                    a_plus=float((np.vdot(vp, UC4) * lat).real),
                    a_minus=float((np.vdot(vm, UC4) * lat).real),
                )
            )
    return blocks


def full_vector(coin_vec: np.ndarray, p: int, q: int, side: int) -> np.ndarray:
    """Joint-space (4, s, s) array for |coin_vec> |chi_p> |chi_q>."""
    return np.einsum(
        "d,y,x->dyx", coin_vec, momentum_vector(q, side), momentum_vector(p, side)
    )


def _is_pair_block(block: MomentumBlock) -> bool:
    """Blocks whose conjugate pair enters the oscillatory part of the expansion."""
    if (block.p, block.q) == (0, 0):
        return False
    return DEGENERATE_TOL < block.theta < math.pi - DEGENERATE_TOL


# ---------------------------------------------------------------------------
# spectral expansion of the target state


@dataclass
class SpectralExpansion:
    """Target-state coefficients in the walk (or controlled-walk) eigenbasis.

    ``a0`` sits on the unique +1 eigenvector, each (a_j, theta_j) is a
    conjugate eigenvector pair with eigenvalues e^{+/- i theta_j}, and
    ``ak`` is the root-sum-square projection on the -1 eigenspace.
    """

    a0: float
    a_j: np.ndarray
    theta_j: np.ndarray
    ak: float
    mode: str = "akr"
    delta: float = 0.0

    @property
    def theta_min(self) -> float:
        return float(self.theta_j.min()) if self.theta_j.size else math.pi

    @property
    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.a_j.tolist(), self.theta_j.tolist()))

    def completeness(self) -> float:
        """a0^2 + 2 sum a_j^2 + ak^2; equals 1 when the target lies in the search subspace."""
        return float(self.a0**2 + 2.0 * np.sum(self.a_j**2) + self.ak**2)


def expand_target(
    blocks: list[MomentumBlock],
    instance: ProblemInstance,
    delta: float | None = None,
) -> SpectralExpansion:
    """Expansion of the target over the walk eigenbasis.

    With ``delta=None`` this is the plain walk target |u_c, m>.  Otherwise
    the ancilla tilts the target: every coefficient scales by cos(delta)
    and the -1 sector gains the whole sin(delta) ancilla-|0> weight.
    """
    n = instance.n_sites
    a0 = 1.0 / math.sqrt(n)
    a_j, theta_j = [], []
    ak_sq = 0.0
    for b in blocks:
        if (b.p, b.q) == (0, 0):
            continue
        if _is_pair_block(b):
            a_j.append(b.a_plus)
            theta_j.append(b.theta)
        else:  # theta = pi sector inside the search subspace
            ak_sq += b.a_plus**2 + b.a_minus**2
    a_j_arr = np.asarray(a_j)
    theta_arr = np.asarray(theta_j)
    if delta is None:
        return SpectralExpansion(a0, a_j_arr, theta_arr, math.sqrt(ak_sq))
    cd, sd = math.cos(delta), math.sin(delta)
    return SpectralExpansion(
        a0 * cd,
        a_j_arr * cd,
        theta_arr,
        math.sqrt(sd**2 + cd**2 * ak_sq),
        mode="controlled",
        delta=delta,
    )


# ---------------------------------------------------------------------------
# the F_lambda kernel and the secular equation


def f_lambda(theta, lam):
    """cot((lambda - theta)/2), the expansion kernel of the auxiliary vector.

    Accepts scalars or arrays in ``theta``.  Signals a pole when lambda
    and theta coincide mod 2 pi instead of silently returning inf.
    """
    half = (np.asarray(lam) - np.asarray(theta)) / 2.0
    s = np.sin(half)
    if np.any(np.abs(s) < 1e-15):
        raise ValueError("f_lambda pole: lambda = theta mod 2 pi")
    return np.cos(half) / s


def secular_residual(lam: float, expansion: SpectralExpansion) -> float:
    """LHS minus RHS of the eigenphase condition.

    a0^2 cot(l/2)/sin l  =  sum_j 2 a_j^2 / (cos l - cos theta_j)
                            + ak^2 tan(l/2)/sin l

    Valid for 0 < |lam| < theta_min (the residual is an even function).
    """
    if lam == 0.0 or abs(lam) >= expansion.theta_min:
        raise ValueError(f"secular residual needs 0 < |lambda| < theta_min, got {lam}")
    sin_l = math.sin(lam)
    lhs = expansion.a0**2 * (math.cos(lam / 2) / math.sin(lam / 2)) / sin_l
    denom = math.cos(lam) - np.cos(expansion.theta_j)
    if np.any(np.abs(denom) < 1e-300):
        raise ValueError("secular residual evaluated at a pole")
    rhs = float(np.sum(2.0 * expansion.a_j**2 / denom))
    rhs += expansion.ak**2 * math.tan(lam / 2) / sin_l
    return lhs - rhs


@dataclass
class SecularSolution:
    """Principal eigenphase of the search iterate plus overlap predictions."""

    alpha: float
    predicted_steps: int
    initial_overlap_bound: float
    final_overlap: float
    sums: tuple[float, float, float]


def _overlap_predictions(expansion: SpectralExpansion, alpha: float) -> tuple[float, float]:
    """Exact finite-sum initial and final overlaps at eigenphase alpha.

    The pair sums run over both conjugate members, hence the factor 2.
    The (F_a + F_-a) terms vanish identically at theta in {0, pi}, so only
    the pairs feed the final-overlap sum.
    """
    t0 = 4.0 * expansion.a0**2 / math.tan(alpha / 2.0) ** 2
    tk = 4.0 * expansion.ak**2 * math.tan(alpha / 2.0) ** 2
    if expansion.a_j.size:
        f_plus = f_lambda(expansion.theta_j, alpha)
        f_minus = f_lambda(expansion.theta_j, -alpha)
        tj = float(np.sum(2.0 * expansion.a_j**2 * (f_plus - f_minus) ** 2))
        w_sum = float(np.sum(2.0 * expansion.a_j**2 * (f_plus + f_minus) ** 2))
    else:
        tj = w_sum = 0.0
    initial = math.sqrt(t0 / (t0 + tj + tk))
    final = 1.0 / math.sqrt(1.0 + w_sum / 4.0)
    return initial, final


def _spectral_sums(expansion: SpectralExpansion, alpha: float) -> tuple[float, float, float]:
    """The three diagnostic sums over the expansion (the -1 sector included)."""
    one_minus_cos = 1.0 - np.cos(expansion.theta_j)
    s1 = float(np.sum(expansion.a_j**2 / one_minus_cos)) + expansion.ak**2 / 2.0
    s2 = (alpha**4 / expansion.a0**2) * (
        float(np.sum(expansion.a_j**2 / one_minus_cos**2)) + expansion.ak**2 / 4.0
    )
    s3 = float(np.sum(expansion.a_j**2 / np.tan(expansion.theta_j / 4.0) ** 2))
    s3 += expansion.ak**2  # cot^2(pi/4) = 1
    return s1, s2, s3


def solve_alpha(
    expansion: SpectralExpansion,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> SecularSolution:
    """Bisect the secular residual on (0, theta_min/2) for the principal root."""
    if expansion.a0 <= 0:
        raise ValueError("expansion must have a0 > 0")
    theta_min = expansion.theta_min
    eps = 1e-12 * theta_min
    lo, hi = eps, theta_min / 2.0 - eps
    f_lo = secular_residual(lo, expansion)
    f_hi = secular_residual(hi, expansion)
    if not (f_lo > 0 > f_hi):
        scan = [
            (lam, secular_residual(lam, expansion))
            for lam in np.linspace(lo, hi, 33)
        ]
        raise SecularBracketError(
            f"no sign change on ({lo:.3e}, {hi:.3e}): f(lo)={f_lo:.3e}, f(hi)={f_hi:.3e}",
            scan,
        )
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = secular_residual(mid, expansion)
        if abs(f_mid) < tol:
            break
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
    alpha = mid
    initial, final = _overlap_predictions(expansion, alpha)
    return SecularSolution(
        alpha=alpha,
        predicted_steps=math.ceil(math.pi / (2.0 * alpha)),
        initial_overlap_bound=initial,
        final_overlap=final,
        sums=_spectral_sums(expansion, alpha),
    )


def eigvec_predictions(
    solution: SecularSolution, expansion: SpectralExpansion
) -> tuple[float, float]:
    """(initial_overlap, final_overlap) for a solved eigenphase."""
    return _overlap_predictions(expansion, solution.alpha)


def akr_sums(
    expansion: SpectralExpansion, alpha: float | None = None
) -> tuple[float, float, float]:
    """Diagnostic sums for the plain-walk expansion; solves alpha if not given."""
    if expansion.mode != "akr":
        raise ValueError("akr_sums expects a plain-walk expansion")
    if alpha is None:
        alpha = solve_alpha(expansion).alpha
    return _spectral_sums(expansion, alpha)


# ---------------------------------------------------------------------------
# dense verification oracle


def dense_matrix(
    op: Callable[[StateVector], StateVector],
    space: Space,
    instance: ProblemInstance,
) -> np.ndarray:
    """Dense matrix of a matrix-free operator, one basis vector at a time."""
    if instance.side > DENSE_SIDE_CAP:
        raise ValueError(f"dense build capped at side {DENSE_SIDE_CAP}")
    dim = space_dim(space, instance)
    mat = np.empty((dim, dim), dtype=np.complex128)
    for i in range(dim):
        amps = np.zeros(dim, dtype=np.complex128)
        amps[i] = 1.0
        mat[:, i] = op(StateVector(space, instance.side, amps)).amps
    return mat


@dataclass
class DenseEigensystem:
    """Eigendecomposition of the full search iterate, sorted by |phase|."""

    phases: np.ndarray
    vectors: np.ndarray  # column i pairs with phases[i]

    def smallest_positive_phase(self, floor: float = 1e-6) -> float:
        pos = self.phases[self.phases > floor]
        return float(pos.min())


def dense_oracle(
    instance: ProblemInstance,
    mode: str = "akr",
    delta: float | None = None,
) -> DenseEigensystem:
    """Eigendecompose the dense search iterate (side <= 8 only)."""
    if mode == "akr":
        ops = WalkOps(instance)
        mat = dense_matrix(ops.apply_search_iterate, Space.JOINT, instance)
    elif mode == "controlled":
        if delta is None:
            raise ValueError("controlled mode needs delta")
        cops = ControlledWalkOps(instance, ControlConfig(delta))
        mat = dense_matrix(cops.apply_search_iterate, Space.CONTROLLED, instance)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    evals, evecs = np.linalg.eig(mat)
    phases = np.angle(evals)
    order = np.argsort(np.abs(phases), kind="stable")
    return DenseEigensystem(phases[order], evecs[:, order])


# ---------------------------------------------------------------------------
# assembled eigenvectors and the search subspace


def _expansion_terms(
    blocks: list[MomentumBlock],
    instance: ProblemInstance,
    delta: float | None,
) -> list[tuple[float, float, np.ndarray, int]]:
    """(coefficient, theta, joint-space vector, ancilla bit) for every eigenvector
    carrying target weight."""
    s = instance.side
    scale = 1.0 if delta is None else math.cos(delta)
    terms: list[tuple[float, float, np.ndarray, int]] = []
    phi0 = full_vector(UC4.astype(np.complex128), 0, 0, s)
    terms.append((scale / math.sqrt(instance.n_sites), 0.0, phi0, 1))
    for b in blocks:
        if (b.p, b.q) == (0, 0):
            continue
        fp = full_vector(b.vec_plus, b.p, b.q, s)
        fm = full_vector(b.vec_minus, b.p, b.q, s)
        if _is_pair_block(b):
            terms.append((scale * b.a_plus, b.theta, fp, 1))
            terms.append((scale * b.a_minus, -b.theta, fm, 1))
        else:
            terms.append((scale * b.a_plus, math.pi, fp, 1))
            terms.append((scale * b.a_minus, math.pi, fm, 1))
    if delta is not None:
        ucm = np.zeros((4, s, s), dtype=np.complex128)
        mx, my = instance.marked
        ucm[:, my, mx] = 0.5
        terms.append((-math.sin(delta), math.pi, ucm, 0))
    return terms


def assemble_secular_eigenvector(
    blocks: list[MomentumBlock],
    instance: ProblemInstance,
    alpha: float,
    delta: float | None = None,
) -> StateVector:
    """Unnormalized |t> + i |w_alpha> built from the momentum blocks.

    When alpha solves the secular equation this is an exact eigenvector of
    the search iterate with eigenvalue e^{i alpha}.
    """
    s = instance.side
    if delta is None:
        out = np.zeros((4, s, s), dtype=np.complex128)
        for a_l, theta_l, vec, _ in _expansion_terms(blocks, instance, None):
            out += (a_l + 1j * a_l * float(f_lambda(theta_l, alpha))) * vec
        return StateVector(Space.JOINT, s, out.reshape(-1))
    out = np.zeros((2, 4, s, s), dtype=np.complex128)
    for a_l, theta_l, vec, bit in _expansion_terms(blocks, instance, delta):
        out[bit] += (a_l + 1j * a_l * float(f_lambda(theta_l, alpha))) * vec
    return StateVector(Space.CONTROLLED, s, out.reshape(-1))


def search_subspace_basis(blocks: list[MomentumBlock], instance: ProblemInstance) -> np.ndarray:
    """Orthonormal columns spanning the invariant search subspace of the joint space."""
    s = instance.side
    cols = [full_vector(UC4.astype(np.complex128), 0, 0, s).reshape(-1)]
    for b in blocks:
        if (b.p, b.q) == (0, 0):
            continue
        cols.append(full_vector(b.vec_plus, b.p, b.q, s).reshape(-1))
        cols.append(full_vector(b.vec_minus, b.p, b.q, s).reshape(-1))
    return np.column_stack(cols)


def reconstruct_walk_action(
    blocks: list[MomentumBlock], instance: ProblemInstance, state: StateVector
) -> StateVector:
    """Apply the walk via its spectral decomposition (verification path).

    The (0, 0) pair vectors are +1 eigenvectors (the theta = 0 degeneracy),
    every other block contributes e^{+/- i theta} on its pair.
    """
    s = instance.side
    psi = state.amps
    out = np.zeros_like(psi)
    for b in blocks:
        pair_phase = 1.0 if (b.p, b.q) == (0, 0) else cmath.exp(1j * b.theta)
        for vec4, phase in (
            (b.vec_one, 1.0),
            (b.vec_minus_one, -1.0),
            (b.vec_plus, pair_phase),
            (b.vec_minus, pair_phase.conjugate() if (b.p, b.q) != (0, 0) else 1.0),
        ):
            fv = full_vector(vec4, b.p, b.q, s).reshape(-1)
            out += phase * fv * np.vdot(fv, psi)
    return StateVector(Space.JOINT, s, out)
