import numpy as np
import pytest

from qdsa.models import (
    amplitude_damping,
    amplitude_damping_channel,
    cascade_three_level,
    identity_model,
    thermal_qubit,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def ad():
    return amplitude_damping(1.0)


@pytest.fixture
def adk():
    return amplitude_damping_channel(0.3)


@pytest.fixture
def m3():
    return cascade_three_level(True)


@pytest.fixture
def dfs3():
    return cascade_three_level(False)


@pytest.fixture
def th():
    return thermal_qubit(2.0, 1.0)


@pytest.fixture
def id2():
    return identity_model(2)


def ket_bra(dim, i, j):
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m
