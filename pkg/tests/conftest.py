import math

import numpy as np
import pytest

from walksearch import ProblemInstance, build_blocks, expand_target, solve_alpha


@pytest.fixture(scope="session")
def inst4():
    return ProblemInstance(4)


@pytest.fixture(scope="session")
def inst8():
    return ProblemInstance(8)


@pytest.fixture(scope="session")
def blocks4(inst4):
    return build_blocks(inst4)


@pytest.fixture(scope="session")
def blocks8(inst8):
    return build_blocks(inst8)


@pytest.fixture(scope="session")
def akr_solution8(inst8, blocks8):
    expansion = expand_target(blocks8, inst8)
    return expansion, solve_alpha(expansion)


def random_state(space, instance, seed=0):
    from walksearch import Space, StateVector
    from walksearch.lattice import space_dim

    rng = np.random.default_rng(seed)
    dim = space_dim(space, instance)
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    amps /= np.linalg.norm(amps)
    return StateVector(space, instance.side, amps)
