import numpy as np
import pytest

from swtrack import design
from swtrack.plants import (THREE_OUTPUT_EIGS, THREE_OUTPUT_PARTITION,
                            THREE_OUTPUT_REFERENCE, TWO_OUTPUT_EIGS,
                            TWO_OUTPUT_PARTITION, TWO_OUTPUT_REFERENCE,
                            three_output_plant, two_output_plant)
from swtrack.rectify import Analyzer


@pytest.fixture(scope="session")
def plant3():
    return three_output_plant()


@pytest.fixture(scope="session")
def plant2():
    return two_output_plant()


@pytest.fixture(scope="session")
def az3(plant3):
    return Analyzer(plant3)


@pytest.fixture(scope="session")
def az2(plant2):
    return Analyzer(plant2)


@pytest.fixture(scope="session")
def ctrl3(az3):
    return design.synthesize(az3, THREE_OUTPUT_REFERENCE,
                             THREE_OUTPUT_PARTITION, THREE_OUTPUT_EIGS,
                             seed=42)


@pytest.fixture(scope="session")
def ctrl2(az2):
    return design.synthesize(az2, TWO_OUTPUT_REFERENCE,
                             TWO_OUTPUT_PARTITION, TWO_OUTPUT_EIGS,
                             seed=42)


@pytest.fixture(scope="session")
def d_exact3(az3):
    return {k: az3.d_k_exact(k) for k in range(4)}


@pytest.fixture(scope="session")
def d_exact2(az2):
    return {k: az2.d_k_exact(k) for k in range(3)}


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))
