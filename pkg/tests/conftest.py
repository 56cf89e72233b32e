import numpy as np
import pytest

from precode_lab.channel import CorrelationSet


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20160406)


@pytest.fixture(scope="session")
def ring_corr():
    """N=32, G=4, Delta=10 deg, omega=0.5."""
    return CorrelationSet.one_ring(32, 4, np.deg2rad(10.0), 0.5)


def block_corr(n_antennas, n_groups, rank, rng):
    """Groups whose covariances live on disjoint coordinate blocks of size
    ``n_antennas // n_groups`` with exact rank ``rank``."""
    size = n_antennas // n_groups
    roots = []
    for g in range(n_groups):
        root = np.zeros((n_antennas, n_antennas), dtype=complex)
        basis = np.linalg.qr(crandn(rng, size, size))[0][:, :rank]
        gains = np.linspace(2.0, 1.0, rank)
        root[g * size : (g + 1) * size, g * size : (g + 1) * size] = (basis * gains) @ basis.conj().T
        roots.append(root)
    return CorrelationSet.from_roots(roots)
