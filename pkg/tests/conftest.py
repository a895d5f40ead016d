import numpy as np
import pytest

from piezoqubit.circuit import TWO_PI, BVDCircuit
from piezoqubit.fixtures import sample_couplings, sample_qubit
from piezoqubit.quantization import synthesize_circuit


@pytest.fixture(scope="session")
def circuit_a() -> BVDCircuit:
    q = sample_qubit("A")
    return synthesize_circuit(sample_couplings("A"), q.omega, q.total_capacitance)


@pytest.fixture
def two_pi():
    return TWO_PI


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
