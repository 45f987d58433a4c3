import numpy as np
import pytest

from coconvex import make_cone, wulff_shape
from coconvex.lab import InstanceGenerator, random_instance

SQRT2 = np.sqrt(2.0)
U_STAR = np.array([-1.0, -1.0]) / SQRT2


@pytest.fixture
def quadrant():
    return make_cone([[1.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def quad_set(quadrant):
    """Quadrant cut by x + y < 2: co-volume 2, one facet of length 2√2."""
    return wulff_shape(quadrant, [U_STAR], [SQRT2])


def instance(seed, n=2, omega=3):
    return random_instance(InstanceGenerator(n=n, omega_size=omega, seed=seed))
