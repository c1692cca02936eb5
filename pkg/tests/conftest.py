from pathlib import Path

import pytest

from qexplogic.contexts import Context, ContextFamily, close_family, trivial_context
from qexplogic.linalg import DensityOperator, qubit_spin_projection

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def spin_context(n, name):
    return Context((qubit_spin_projection(n, 1), qubit_spin_projection(n, -1)), name=name)


AZ = spin_context((0, 0, 1), "z")
AX = spin_context((1, 0, 0), "x")
AY = spin_context((0, 1, 0), "y")
PZ_UP, PZ_DOWN = qubit_spin_projection((0, 0, 1), 1), qubit_spin_projection((0, 0, 1), -1)
PX_UP = qubit_spin_projection((1, 0, 0), 1)


def fam(*ctxs):
    return close_family(list(ctxs))


@pytest.fixture
def f_z():
    return fam(AZ)


@pytest.fixture
def f_zx():
    return fam(AZ, AX)


@pytest.fixture
def f_zxy():
    return fam(AZ, AX, AY)


@pytest.fixture
def f_trivial():
    return ContextFamily([trivial_context(2)])


@pytest.fixture
def mixed2():
    return DensityOperator.maximally_mixed(2)


@pytest.fixture
def biased():
    return DensityOperator([["3/4", "0"], ["0", "1/4"]])


@pytest.fixture(scope="session")
def scenarios():
    return SCENARIOS
