import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, n):
    from qfluid.statevector import QuantumState

    v = rng.standard_normal(2 ** n) + 1j * rng.standard_normal(2 ** n)
    return QuantumState.from_vector(v)


def equal_up_to_phase(a, b, tol):
    """max |a - e^{i phi} b| after aligning the phase on the largest entry."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    i = np.argmax(np.abs(b))
    phase = a[i] / b[i]
    phase /= abs(phase)
    return np.max(np.abs(a - phase * b)) < tol
