import numpy as np
import pytest

from lowerq.manifold import euclidean, ring
from lowerq.quadrature import shell_grid


@pytest.fixture(scope="session")
def flat_grid2():
    return shell_grid(ring(euclidean(2), [0.0, 0.0], 0.5, 1.0))


@pytest.fixture(scope="session")
def flat_grid3():
    return shell_grid(ring(euclidean(3), np.zeros(3), 0.5, 1.0), 32, 64)
