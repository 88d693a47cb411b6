import numpy as np
import pytest

from warpedbundle.cohomology import DiskFunction, default_radii
from warpedbundle.rotation import LIOUVILLE_CF, RotationNumber


@pytest.fixture(scope="session")
def golden():
    return RotationNumber.golden()


@pytest.fixture(scope="session")
def liouville():
    return RotationNumber.from_cf(LIOUVILLE_CF)


@pytest.fixture
def rng():
    return np.random.default_rng(20251015)


def random_trig_poly(rng, K, radii=None, scale=1.0):
    """Random real trigonometric polynomial per radius, vanishing modes at r = 0."""
    radii = default_radii() if radii is None else np.asarray(radii)
    c = np.zeros((radii.size, 2 * K + 1), dtype=complex)
    pos = rng.normal(size=(radii.size, K)) + 1j * rng.normal(size=(radii.size, K))
    c[:, K + 1:] = scale * pos
    c[:, :K] = np.conj(c[:, K + 1:][:, ::-1])
    c[:, K] = scale * rng.normal(size=radii.size)
    c[radii == 0, :K] = 0
    c[radii == 0, K + 1:] = 0
    return DiskFunction(K, radii, c)
