"""Self-check suite: dense-oracle cross-checks and operator invariants.

Backs the ``walksearch verify`` CLI subcommand.  Each check returns a
(name, passed, detail) triple; the CLI turns any failure into exit code 2.
"""

from __future__ import annotations

import math

import numpy as np

from .controlled import ControlConfig, ControlledWalkOps, run_controlled, tuned_delta
from .lattice import ProblemInstance, Space, make_uniform
from .spectral import (
    assemble_secular_eigenvector,
    build_blocks,
    dense_oracle,
    expand_target,
    f_lambda,
    solve_alpha,
)
from .walk import WalkOps, run_akr

Check = tuple[str, bool, str]


def _check_dense_alpha(side: int, mode: str, delta: float | None) -> Check:
    instance = ProblemInstance(side)
    blocks = build_blocks(instance)
    expansion = expand_target(blocks, instance, delta)
    solution = solve_alpha(expansion)
    dense = dense_oracle(instance, mode, delta).smallest_positive_phase()
    diff = abs(solution.alpha - dense)
    name = f"secular alpha vs dense eigenphase ({mode}, side {side})"
    return name, diff < 1e-8, f"|diff| = {diff:.2e}"


def _check_eigenvector(side: int, delta: float | None) -> Check:
    instance = ProblemInstance(side)
    blocks = build_blocks(instance)
    expansion = expand_target(blocks, instance, delta)
    alpha = solve_alpha(expansion).alpha
    vec = assemble_secular_eigenvector(blocks, instance, alpha, delta)
    if delta is None:
        out = WalkOps(instance).apply_search_iterate(vec.copy())
    else:
        out = ControlledWalkOps(instance, ControlConfig(delta)).apply_search_iterate(vec.copy())
    resid = np.linalg.norm(out.amps - np.exp(1j * alpha) * vec.amps) / vec.norm()
    mode = "akr" if delta is None else "controlled"
    name = f"assembled eigenvector satisfies the eigen-equation ({mode}, side {side})"
    return name, resid < 1e-8, f"residual = {resid:.2e}"


def _check_f_identities(n_points: int = 100) -> Check:
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(n_points):
        theta = rng.uniform(0.05, math.pi - 0.05)
        lam = rng.uniform(-math.pi + 0.05, math.pi - 0.05)
        if abs(lam - theta) < 0.02 or abs(lam + theta) < 0.02 or abs(lam) < 0.02:
            continue
        f = f_lambda(theta, lam)
        lhs = np.exp(1j * theta) * (-1 + 1j * f)
        rhs = np.exp(1j * lam) * (1 + 1j * f)
        worst = max(worst, abs(lhs - rhs))
        pair = f_lambda(theta, lam) + f_lambda(-theta, lam)
        closed = 2 * math.sin(lam) / (math.cos(theta) - math.cos(lam))
        worst = max(worst, abs(pair - closed))
    worst = max(
        worst,
        abs(f_lambda(0.0, 0.9) - 1 / math.tan(0.45)),
        abs(f_lambda(math.pi, 0.9) + math.tan(0.45)),
    )
    return "F_lambda identities at random points", worst < 1e-12, f"worst = {worst:.2e}"


def _check_unitarity(side: int = 8, iterations: int = 1000) -> Check:
    instance = ProblemInstance(side)
    config = tuned_delta(instance, 1.0)
    ops = ControlledWalkOps(instance, config)
    state = make_uniform(Space.CONTROLLED, instance)
    for _ in range(iterations):
        ops.apply_search_iterate(state)
    drift = abs(state.norm() - 1.0)
    name = f"norm drift after {iterations} controlled iterations (side {side})"
    return name, drift < 1e-10, f"drift = {drift:.2e}"


def _check_block_overlaps(side: int = 8) -> Check:
    instance = ProblemInstance(side, marked=(3, 5))
    blocks = build_blocks(instance)
    ref = 1.0 / math.sqrt(2 * instance.n_sites)
    worst = max(
        max(abs(abs(b.a_plus) - ref), abs(abs(b.a_minus) - ref))
        for b in blocks
        if (b.p, b.q) != (0, 0)
    )
    return "block target overlaps = 1/sqrt(2N)", worst < 1e-9, f"worst = {worst:.2e}"


def _check_delta_zero_reduction(side: int = 8, steps: int = 50) -> Check:
    instance = ProblemInstance(side)
    _, log_akr = run_akr(instance, steps)
    _, log_ctl = run_controlled(instance, ControlConfig(0.0), steps)
    diff = max(
        float(np.max(np.abs(log_akr.marked_prob - log_ctl.marked_prob))),
        float(np.max(np.abs(np.abs(log_akr.overlap) - np.abs(log_ctl.overlap)))),
    )
    return "delta = 0 reduces to the plain walk", diff < 1e-12, f"max diff = {diff:.2e}"


def _check_completeness(side: int = 8) -> Check:
    instance = ProblemInstance(side)
    blocks = build_blocks(instance)
    worst = abs(expand_target(blocks, instance).completeness() - 1.0)
    worst = max(
        worst,
        abs(expand_target(blocks, instance, math.acos(0.5)).completeness() - 1.0),
    )
    return "target expansion completeness", worst < 1e-9, f"worst = {worst:.2e}"


def run_verification() -> list[Check]:
    checks = [
        _check_dense_alpha(4, "akr", None),
        _check_dense_alpha(4, "controlled", math.acos(0.5)),
        _check_eigenvector(4, None),
        _check_eigenvector(4, math.acos(0.5)),
        _check_f_identities(),
        _check_unitarity(),
        _check_block_overlaps(),
        _check_delta_zero_reduction(),
        _check_completeness(),
    ]
    return checks
