import cmath
import math

import numpy as np
import pytest

from walksearch import (
    ControlConfig,
    ControlledWalkOps,
    ProblemInstance,
    Space,
    WalkOps,
    build_blocks,
    dense_oracle,
    expand_target,
    f_lambda,
    secular_residual,
    solve_alpha,
)
from walksearch.spectral import (
    SecularBracketError,
    SpectralExpansion,
    _overlap_predictions,
    akr_sums,
    assemble_secular_eigenvector,
    block_theta,
    coin_block_matrix,
    dense_matrix,
    eigvec_predictions,
    full_vector,
    reconstruct_walk_action,
    search_subspace_basis,
)

from conftest import random_state


# -- momentum blocks --------------------------------------------------------


def test_block_theta_examples(inst4):
    assert block_theta(0, 0, 4) == 0.0
    assert block_theta(1, 0, 4) == pytest.approx(math.pi / 3)  # cos = (0+1)/2
    assert block_theta(2, 2, 4) == pytest.approx(math.pi)


def test_block_eigenphase_formula(blocks8):
    for b in blocks8:
        expected = 0.5 * (math.cos(2 * math.pi * b.p / 8) + math.cos(2 * math.pi * b.q / 8))
        assert abs(math.cos(b.theta) - expected) < 1e-12


def test_block_eigvecs_orthonormal(blocks8):
    for b in blocks8:
        v = b.coin_eigvecs
        assert np.max(np.abs(v.conj().T @ v - np.eye(4))) < 1e-10


def test_block_eigvecs_diagonalize_sector(blocks8):
    for b in blocks8:
        mat = coin_block_matrix(b.p, b.q, 8)
        if (b.p, b.q) == (0, 0):
            eigvals = [1.0, -1.0, 1.0, 1.0]
        else:
            eigvals = b.eigenvalues()
        for vec, val in zip(b.coin_eigvecs.T, eigvals):
            assert np.linalg.norm(mat @ vec - val * vec) < 1e-9


def test_zero_block_plus_one_vector_is_uniform_coin(blocks4):
    b0 = blocks4[0]
    assert (b0.p, b0.q) == (0, 0)
    assert b0.theta == 0.0
    assert np.allclose(b0.vec_one, 0.5)


def test_minus_one_block_for_even_side(blocks8):
    b = next(b for b in blocks8 if (b.p, b.q) == (4, 4))
    assert math.cos(b.theta) == pytest.approx(-1.0)


@pytest.mark.parametrize("marked", [(0, 0), (2, 1), (3, 3)])
def test_block_target_overlaps(marked):
    inst = ProblemInstance(4, marked=marked)
    blocks = build_blocks(inst)
    ref = 1 / math.sqrt(2 * inst.n_sites)
    for b in blocks:
        if (b.p, b.q) == (0, 0):
            assert b.a_plus == 0.0 and b.a_minus == 0.0
            continue
        assert abs(b.a_plus - ref) < 1e-9
        assert abs(b.a_minus - ref) < 1e-9


def test_block_reconstruction_matches_walk(inst8, blocks8):
    ops = WalkOps(inst8)
    for seed in range(2):
        state = random_state(Space.JOINT, inst8, seed)
        direct = ops.apply_walk(state.copy())
        via_blocks = reconstruct_walk_action(blocks8, inst8, state)
        assert np.linalg.norm(direct.amps - via_blocks.amps) < 1e-10


# -- target expansion --------------------------------------------------------


def test_expand_target_akr(inst8, blocks8):
    exp = expand_target(blocks8, inst8)
    assert exp.a0 == 1 / math.sqrt(64)
    assert exp.mode == "akr"
    # side^2 - 2 sectors carry a conjugate pair; the (4,4) sector feeds ak
    assert exp.a_j.size == 62
    assert exp.ak == pytest.approx(1 / math.sqrt(64), abs=1e-12)
    assert exp.completeness() == pytest.approx(1.0, abs=1e-9)
    assert exp.theta_min > 0


def test_expand_target_controlled_scaling(inst8, blocks8):
    delta = math.acos(0.5)
    akr = expand_target(blocks8, inst8)
    ctl = expand_target(blocks8, inst8, delta)
    assert np.allclose(ctl.a_j, 0.5 * akr.a_j, atol=1e-15)
    assert ctl.a0 == pytest.approx(0.5 * akr.a0)
    expected_ak = math.sqrt(math.sin(delta) ** 2 + 0.25 * akr.ak**2)
    assert ctl.ak == pytest.approx(expected_ak, abs=1e-12)
    assert ctl.ak == pytest.approx(math.sin(delta), abs=2 / inst8.n_sites)
    assert ctl.completeness() == pytest.approx(1.0, abs=1e-9)


def test_expansion_residual_matches_dense_projection(inst8, blocks8):
    # whatever completeness misses must equal the weight outside the subspace
    exp = expand_target(blocks8, inst8)
    basis = search_subspace_basis(blocks8, inst8)
    target = np.zeros((4, 8, 8), dtype=np.complex128)
    target[:, 0, 0] = 0.5
    inside = np.linalg.norm(basis.conj().T @ target.reshape(-1)) ** 2
    assert abs((1.0 - exp.completeness()) - (1.0 - inside)) < 1e-9


# -- F_lambda ----------------------------------------------------------------


def test_f_lambda_boundary_values():
    lam = 0.9
    assert f_lambda(0.0, lam) == pytest.approx(1 / math.tan(lam / 2), abs=1e-14)
    assert f_lambda(math.pi, lam) == pytest.approx(-math.tan(lam / 2), abs=1e-14)


def test_f_lambda_pair_identity_spot():
    theta, lam = math.pi / 3, math.pi / 7
    lhs = f_lambda(theta, lam) + f_lambda(-theta, lam)
    rhs = 2 * math.sin(lam) / (math.cos(theta) - math.cos(lam))
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_f_lambda_eigen_identity_random():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 100:
        theta = rng.uniform(-math.pi + 0.05, math.pi - 0.05)
        lam = rng.uniform(-math.pi + 0.05, math.pi - 0.05)
        if abs(math.sin((lam - theta) / 2)) < 1e-2:
            continue
        f = f_lambda(theta, lam)
        lhs = cmath.exp(1j * theta) * (-1 + 1j * f)
        rhs = cmath.exp(1j * lam) * (1 + 1j * f)
        assert abs(lhs - rhs) < 1e-12
        checked += 1


def test_f_lambda_pole_signaled():
    with pytest.raises(ValueError):
        f_lambda(0.3, 0.3)
    with pytest.raises(ValueError):
        f_lambda(np.array([0.1, 0.3]), 0.3)


# -- secular equation --------------------------------------------------------


def test_secular_residual_is_even(inst8, blocks8):
    exp = expand_target(blocks8, inst8)
    for lam in (0.01, 0.1, 0.2):
        assert secular_residual(lam, exp) == pytest.approx(
            secular_residual(-lam, exp), rel=1e-12
        )


def test_secular_residual_single_term_closed_form():
    exp = SpectralExpansion(a0=0.3, a_j=np.array([]), theta_j=np.array([]), ak=0.0)
    for lam in (0.1, 1.0, 2.0, 3.0):
        closed = 0.3**2 * (math.cos(lam / 2) / math.sin(lam / 2)) / math.sin(lam)
        assert secular_residual(lam, exp) == pytest.approx(closed)
        assert secular_residual(lam, exp) > 0


def test_secular_residual_sign_change_in_bracket(inst4, blocks4):
    exp = expand_target(blocks4, inst4)
    eps = 1e-12 * exp.theta_min
    assert secular_residual(eps, exp) > 0
    assert secular_residual(exp.theta_min / 2 - eps, exp) < 0


def test_secular_residual_domain(inst4, blocks4):
    exp = expand_target(blocks4, inst4)
    with pytest.raises(ValueError):
        secular_residual(0.0, exp)
    with pytest.raises(ValueError):
        secular_residual(exp.theta_min, exp)


def test_solve_alpha_no_root_reports():
    exp = SpectralExpansion(a0=0.5, a_j=np.array([]), theta_j=np.array([]), ak=0.0)
    with pytest.raises(SecularBracketError):
        solve_alpha(exp)


def test_solve_alpha_residual_tiny(inst8, blocks8, akr_solution8):
    exp, sol = akr_solution8
    assert abs(secular_residual(sol.alpha, exp)) < 1e-12
    assert 0 < sol.alpha < exp.theta_min / 2
    # -alpha is a root as well
    assert abs(secular_residual(-sol.alpha, exp)) < 1e-12


def test_solve_alpha_matches_dense_akr(inst4, blocks4):
    exp = expand_target(blocks4, inst4)
    sol = solve_alpha(exp)
    dense = dense_oracle(inst4).smallest_positive_phase()
    assert abs(sol.alpha - dense) < 1e-8


def test_solve_alpha_matches_dense_controlled(inst8, blocks8):
    delta = math.acos(0.5)
    exp = expand_target(blocks8, inst8, delta)
    sol = solve_alpha(exp)
    dense = dense_oracle(inst8, "controlled", delta).smallest_positive_phase()
    assert abs(sol.alpha - dense) < 1e-8


def test_w_vector_orthogonal_to_target_at_root(akr_solution8):
    exp, sol = akr_solution8
    total = exp.a0**2 * f_lambda(0.0, sol.alpha)
    total += np.sum(
        exp.a_j**2 * (f_lambda(exp.theta_j, sol.alpha) + f_lambda(-exp.theta_j, sol.alpha))
    )
    total += exp.ak**2 * f_lambda(math.pi, sol.alpha)
    assert abs(total) < 1e-10


# -- assembled eigenvectors --------------------------------------------------


@pytest.mark.parametrize("marked", [(0, 0), (1, 3)])
def test_assembled_eigenvector_akr(marked):
    inst = ProblemInstance(4, marked=marked)
    blocks = build_blocks(inst)
    alpha = solve_alpha(expand_target(blocks, inst)).alpha
    vec = assemble_secular_eigenvector(blocks, inst, alpha)
    out = WalkOps(inst).apply_search_iterate(vec.copy())
    resid = np.linalg.norm(out.amps - np.exp(1j * alpha) * vec.amps) / vec.norm()
    assert resid < 1e-8


def test_assembled_eigenvector_controlled(inst4, blocks4):
    delta = math.acos(0.5)
    alpha = solve_alpha(expand_target(blocks4, inst4, delta)).alpha
    vec = assemble_secular_eigenvector(blocks4, inst4, alpha, delta)
    ops = ControlledWalkOps(inst4, ControlConfig(delta))
    out = ops.apply_search_iterate(vec.copy())
    resid = np.linalg.norm(out.amps - np.exp(1j * alpha) * vec.amps) / vec.norm()
    assert resid < 1e-8


def test_expansion_terms_reassemble_target(inst4, blocks4):
    # sum of a_l |Phi_l> over the expansion must give back |u_c, m>
    from walksearch.spectral import _expansion_terms

    total = np.zeros((4, 4, 4), dtype=np.complex128)
    for a_l, _, vec, _ in _expansion_terms(blocks4, inst4, None):
        total += a_l * vec
    target = np.zeros((4, 4, 4), dtype=np.complex128)
    target[:, 0, 0] = 0.5
    assert np.linalg.norm(total - target) < 1e-12


# -- overlap predictions -----------------------------------------------------


def test_predictions_trivial_expansion():
    exp = SpectralExpansion(a0=1.0, a_j=np.array([]), theta_j=np.array([]), ak=0.0)
    initial, final = _overlap_predictions(exp, 0.1)
    assert initial == 1.0
    assert final == 1.0


def test_eigvec_predictions_returns_solution_values(akr_solution8):
    exp, sol = akr_solution8
    initial, final = eigvec_predictions(sol, exp)
    assert initial == pytest.approx(sol.initial_overlap_bound)
    assert final == pytest.approx(sol.final_overlap)
    assert 0 < final <= 1
    assert 0.9 < initial <= 1


def test_final_overlap_prediction_matches_simulation(inst8, blocks8, akr_solution8):
    from walksearch import run_akr

    exp, sol = akr_solution8
    steps = int(1.5 * math.pi / (2 * sol.alpha))
    _, log = run_akr(inst8, steps)
    observed = float(np.max(np.abs(log.overlap)))
    assert sol.final_overlap == pytest.approx(observed, rel=0.15)


def test_controlled_final_overlap_constant_order(inst8, blocks8):
    from walksearch import run_controlled, tuned_delta

    config = tuned_delta(inst8, 1.0)
    exp = expand_target(blocks8, inst8, config.delta)
    sol = solve_alpha(exp)
    assert sol.final_overlap >= 0.5
    steps = int(1.5 * math.pi / (2 * sol.alpha))
    _, log = run_controlled(inst8, config, steps)
    assert sol.final_overlap == pytest.approx(float(np.max(np.abs(log.overlap))), rel=0.15)


def test_alpha_scaling_band_across_sides():
    scaled = []
    for side in (8, 16, 32, 64, 128):
        inst = ProblemInstance(side)
        sol = solve_alpha(expand_target(build_blocks(inst), inst))
        n = inst.n_sites
        scaled.append(sol.alpha * math.sqrt(n * math.log(n)))
    assert max(scaled) / min(scaled) < 1.5


# -- diagnostic sums ---------------------------------------------------------


def test_akr_sums_scale_like_log(inst8, blocks8, akr_solution8):
    exp, sol = akr_solution8
    s1, s2, s3 = akr_sums(exp, sol.alpha)
    ln_n = math.log(inst8.n_sites)
    assert 0.1 < s1 / ln_n < 0.3
    assert 0.5 < s2 * ln_n**2 < 2.0
    assert 0.8 < s3 / ln_n < 1.6


def test_akr_sums_rejects_controlled(inst8, blocks8):
    with pytest.raises(ValueError):
        akr_sums(expand_target(blocks8, inst8, 0.5))


# -- dense oracle ------------------------------------------------------------


def test_dense_oracle_unitary_moduli(inst4):
    ops = WalkOps(inst4)
    mat = dense_matrix(ops.apply_search_iterate, Space.JOINT, inst4)
    assert np.max(np.abs(np.abs(np.linalg.eigvals(mat)) - 1)) < 1e-10


def test_dense_oracle_phases_in_conjugate_pairs(inst4):
    eigsys = dense_oracle(inst4)
    mask = (np.abs(eigsys.phases) > 1e-8) & (np.abs(eigsys.phases) < math.pi - 1e-8)
    nonreal = np.sort(eigsys.phases[mask])
    # complex eigenvalues of a real unitary pair up as e^{+/- i theta}
    assert np.max(np.abs(nonreal + nonreal[::-1])) < 1e-9


def test_dense_oracle_principal_pair_spans_initial_state(inst4):
    eigsys = dense_oracle(inst4)
    nonzero = np.abs(eigsys.phases) > 1e-8
    vecs = eigsys.vectors[:, nonzero][:, :2]
    phi0 = np.full(4 * 16, 1 / math.sqrt(4 * 16), dtype=np.complex128)
    weight = np.linalg.norm(vecs.conj().T @ phi0) ** 2
    assert weight > 0.93  # 1 - O(1/ln^2 N) at this size


def test_dense_oracle_side_cap():
    with pytest.raises(ValueError):
        dense_oracle(ProblemInstance(16))
