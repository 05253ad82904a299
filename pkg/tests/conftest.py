import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cuspflow import GeneratorSpec, GroupShift, SchottkyGroup, hyperbolic_generator
from cuspflow.config import two_generator, three_generator
from cuspflow.hyperbolic import DegenerateGeometryWarning
from cuspflow.suspension import h_top, s_infinity
from cuspflow.transitions import PotentialSpecF, detect_t_prime

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _quiet_geometry():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateGeometryWarning)
        yield


@pytest.fixture(scope="session")
def grp2():
    return two_generator()


@pytest.fixture(scope="session")
def grp3():
    return three_generator()


def hyperbolic_pair(ell):
    """Two hyperbolic generators with perpendicular axes (no parabolics)."""
    a = hyperbolic_generator(0.0, np.pi, ell)
    b = hyperbolic_generator(np.pi / 2, 3 * np.pi / 2, ell)
    return SchottkyGroup((GeneratorSpec.auto("a", a, 0.02), GeneratorSpec.auto("b", b, 0.02)))


@pytest.fixture(scope="session")
def hyp4():
    return hyperbolic_pair(4.0)


@pytest.fixture(scope="session")
def shift1(grp2):
    return GroupShift(grp2)


@pytest.fixture(scope="session")
def sinf1(shift1):
    return s_infinity(shift1)


@pytest.fixture(scope="session")
def htop1(shift1, sinf1):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return h_top(shift1, sinf1)


@pytest.fixture(scope="session")
def spec61(grp2):
    return PotentialSpecF.example61(grp2)


@pytest.fixture(scope="session")
def report61(spec61, shift1, sinf1):
    return detect_t_prime(spec61, shift1, sinf1)
