import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_hermitian(rng, n, size=None):
    shape = (n, n) if size is None else (size, n, n)
    g = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return 0.5 * (g + np.conj(np.swapaxes(g, -1, -2)))


def random_density(rng, n, size=None):
    """Ginibre states from numpy's generator, independent of hyperfid.sampling."""
    shape = (n, n) if size is None else (size, n, n)
    g = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    rho = g @ np.conj(np.swapaxes(g, -1, -2))
    rho = 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))
    return rho / np.trace(rho, axis1=-2, axis2=-1).real[..., None, None]


def random_ket(rng, n):
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    return psi / np.linalg.norm(psi)


def random_ball(rng, size, radius=1.0):
    d = rng.normal(size=(size, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * radius * rng.uniform(size=(size, 1)) ** (1 / 3)


def qubit(n):
    n = np.asarray(n, dtype=float)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return 0.5 * (np.eye(2) + n[..., 0, None, None] * sx + n[..., 1, None, None] * sy + n[..., 2, None, None] * sz)


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)
