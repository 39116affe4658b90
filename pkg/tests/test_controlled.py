import math

import numpy as np
import pytest

from walksearch import (
    ControlConfig,
    ControlledWalkOps,
    ProblemInstance,
    Space,
    StateVector,
    WalkOps,
    make_uniform,
    run_akr,
    run_controlled,
    tuned_delta,
)
from walksearch.spectral import dense_matrix, full_vector

from conftest import random_state


DELTA = math.acos(0.5)


def controlled_ops(inst, delta=DELTA):
    return ControlledWalkOps(inst, ControlConfig(delta))


def test_config_validation():
    with pytest.raises(ValueError):
        ControlConfig(-0.1)
    with pytest.raises(ValueError):
        ControlConfig(math.pi / 2)
    cfg = ControlConfig(0.3)
    assert cfg.cos_delta**2 + cfg.sin_delta**2 == pytest.approx(1.0, abs=1e-15)


def test_tuned_delta_formula(inst8):
    cfg = tuned_delta(inst8, 1.0)
    assert cfg.cos_delta == pytest.approx(1 / math.sqrt(math.log(64)), abs=1e-15)
    assert cfg.c_delta == 1.0


def test_tuned_delta_zero_when_log_matches(inst4):
    # c_delta = sqrt(ln N) makes cos(delta) = 1, so delta = 0
    cfg = tuned_delta(inst4, math.sqrt(math.log(16)))
    assert cfg.delta == pytest.approx(0.0, abs=1e-12)


def test_tuned_delta_rejects_large_constant(inst4):
    with pytest.raises(ValueError):
        tuned_delta(inst4, 10.0)


def test_x_delta_zero_is_identity(inst4):
    ops = controlled_ops(inst4, delta=0.0)
    state = random_state(Space.CONTROLLED, inst4, seed=0)
    before = state.amps.copy()
    ops.apply_x_delta(state)
    assert np.array_equal(state.amps, before)


def test_x_delta_dagger_rotates_ancilla_one(inst4):
    # X_delta^dag |1> = -sin d |0> + cos d |1>
    ops = controlled_ops(inst4)
    state = make_uniform(Space.CONTROLLED, inst4)  # ancilla |1>
    ops.apply_x_delta(state, dagger=True)
    v = state.view()
    scale = 1 / math.sqrt(4 * 16)
    assert np.allclose(v[0], -math.sin(DELTA) * scale)
    assert np.allclose(v[1], math.cos(DELTA) * scale)


def test_x_delta_roundtrip(inst8):
    ops = controlled_ops(inst8)
    state = random_state(Space.CONTROLLED, inst8, seed=1)
    before = state.amps.copy()
    ops.apply_x_delta(state)
    ops.apply_x_delta(state, dagger=True)
    assert np.max(np.abs(state.amps - before)) < 1e-15


def test_z_bar(inst4):
    ops = controlled_ops(inst4)
    state = random_state(Space.CONTROLLED, inst4, seed=2)
    before = state.view().copy()
    ops.apply_z_bar(state)
    v = state.view()
    assert np.array_equal(v[1], before[1])
    assert np.array_equal(v[0], -before[0])
    ops.apply_z_bar(state)
    assert np.array_equal(state.view(), before)


def test_controlled_reflection_axis(inst4):
    ops = controlled_ops(inst4)
    state = make_uniform(Space.CONTROLLED, inst4)
    state.amps[:] = 0
    state.view()[1, :, 0, 0] = 0.5  # |1>|u_c>|m>
    ops.apply_controlled_reflection(state)
    assert np.allclose(state.view()[1, :, 0, 0], -0.5)


def test_controlled_reflection_ignores_ancilla_zero(inst4):
    ops = controlled_ops(inst4)
    state = make_uniform(Space.CONTROLLED, inst4)
    state.amps[:] = 0
    state.view()[0, :, 0, 0] = 0.5  # |0>|u_c>|m>
    before = state.amps.copy()
    ops.apply_controlled_reflection(state)
    assert np.array_equal(state.amps, before)


def test_controlled_reflection_ignores_unmarked(inst8):
    ops = controlled_ops(inst8)
    state = random_state(Space.CONTROLLED, inst8, seed=3)
    state.view()[:, :, 0, 0] = 0
    before = state.amps.copy()
    ops.apply_controlled_reflection(state)
    assert np.array_equal(state.amps, before)


def test_iterate_at_delta_zero_reduces_to_plain_walk(inst8):
    cops = controlled_ops(inst8, delta=0.0)
    wops = WalkOps(inst8)
    joint = random_state(Space.JOINT, inst8, seed=4)
    ctl = make_uniform(Space.CONTROLLED, inst8)
    ctl.amps[:] = 0
    ctl.view()[1] = joint.view()
    cops.apply_search_iterate(ctl)
    wops.apply_search_iterate(joint)
    assert np.max(np.abs(ctl.view()[1] - joint.view())) < 1e-15
    assert np.max(np.abs(ctl.view()[0])) == 0.0


def test_minus_one_sector_exact(inst8):
    # C = Z_bar . c1W sends |0> x psi to -|0> x psi with no float error
    ops = controlled_ops(inst8)
    state = make_uniform(Space.CONTROLLED, inst8)
    state.amps[:] = 0
    rng = np.random.default_rng(5)
    psi = rng.normal(size=(4, 8, 8)) + 1j * rng.normal(size=(4, 8, 8))
    psi /= np.linalg.norm(psi)
    state.view()[0] = psi
    ops.apply_controlled_walk(state)
    ops.apply_z_bar(state)
    assert np.array_equal(state.view()[0], -psi)
    assert np.max(np.abs(state.view()[1])) == 0.0


def test_eigenvalue_transfer_to_controlled_walk(inst8, blocks8):
    # C(|1> x Phi) = e^{i theta} (|1> x Phi) for every walk eigenpair
    ops = controlled_ops(inst8)
    for b in blocks8[:16]:
        if (b.p, b.q) == (0, 0):
            continue
        amps = full_vector(b.vec_plus, b.p, b.q, 8).reshape(-1)
        state = StateVector(Space.CONTROLLED, 8, np.zeros(512, dtype=np.complex128))
        state.view()[1] = amps.reshape(4, 8, 8)
        ops.apply_controlled_walk(state)
        ops.apply_z_bar(state)
        expect = np.exp(1j * b.theta) * amps
        assert np.linalg.norm(state.view()[1].reshape(-1) - expect) < 1e-9


def test_iterate_equals_tilted_reflection_form(inst4):
    # U_C = (Z_bar . c1W) . (I - 2|delta_1, u_c, m><delta_1, u_c, m|), densely
    ops = controlled_ops(inst4)
    whole = dense_matrix(ops.apply_search_iterate, Space.CONTROLLED, inst4)

    dim = 8 * 16
    tilted = np.zeros(dim, dtype=np.complex128)
    t = StateVector(Space.CONTROLLED, 4, tilted)
    v = t.view()
    v[0, :, 0, 0] = -math.sin(DELTA) * 0.5
    v[1, :, 0, 0] = math.cos(DELTA) * 0.5

    def alt(state):
        proj = np.vdot(t.amps, state.amps)
        state.amps[:] = state.amps - 2.0 * proj * t.amps
        ops.apply_controlled_walk(state)
        ops.apply_z_bar(state)
        return state

    alt_mat = dense_matrix(alt, Space.CONTROLLED, inst4)
    assert np.max(np.abs(whole - alt_mat)) < 1e-12


def test_run_controlled_initial_overlap(inst8):
    cfg = ControlConfig(DELTA)
    _, log = run_controlled(inst8, cfg, 0)
    assert abs(log.overlap[0]) == pytest.approx(math.cos(DELTA) / math.sqrt(64), abs=1e-14)


def test_delta_zero_probe_logs_match_plain_walk(inst8):
    steps = 100
    _, log_akr = run_akr(inst8, steps)
    _, log_ctl = run_controlled(inst8, ControlConfig(0.0), steps)
    assert np.max(np.abs(log_akr.marked_prob - log_ctl.marked_prob)) < 1e-12
    assert np.max(np.abs(np.abs(log_akr.overlap) - np.abs(log_ctl.overlap))) < 1e-12


def test_coefficient_scaling_against_blocks(inst8, blocks8):
    # <delta_1, u_c, m | (|1> x Phi_pq^+-) = cos(delta) a_pq
    ops = controlled_ops(inst8)
    cfg = ops.config
    for b in blocks8[:12]:
        if (b.p, b.q) == (0, 0):
            continue
        for vec4, a in ((b.vec_plus, b.a_plus), (b.vec_minus, b.a_minus)):
            state = StateVector(Space.CONTROLLED, 8, np.zeros(512, dtype=np.complex128))
            state.view()[1] = full_vector(vec4, b.p, b.q, 8)
            got = ops.target_overlap(state)
            assert abs(got - cfg.cos_delta * a) < 1e-12


def test_target_ancilla_zero_weight_is_sin_delta(inst8):
    # the ancilla-|0> component of |t_delta> carries exactly |sin delta|
    cfg = ControlConfig(DELTA)
    state = StateVector(Space.CONTROLLED, 8, np.zeros(512, dtype=np.complex128))
    v = state.view()
    v[0, :, 0, 0] = -cfg.sin_delta * 0.5
    v[1, :, 0, 0] = cfg.cos_delta * 0.5
    assert np.linalg.norm(v[0]) == pytest.approx(abs(cfg.sin_delta), abs=1e-12)
    assert state.norm() == pytest.approx(1.0, abs=1e-12)


def test_norm_preserved_many_iterations(inst8):
    cfg = tuned_delta(inst8, 1.0)
    ops = ControlledWalkOps(inst8, cfg)
    state = make_uniform(Space.CONTROLLED, inst8)
    for _ in range(500):
        ops.apply_search_iterate(state)
    assert abs(state.norm() - 1.0) < 1e-12
