import numpy as np
import pytest


def random_unitary(rng, dim):
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_pure(rng, dim):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density(rng, dim, rank=None):
    """Random mixture of ``rank`` random pure states with Dirichlet weights."""
    rank = rank or dim
    w = rng.dirichlet(np.ones(rank))
    rho = np.zeros((dim, dim), dtype=complex)
    for wi in w:
        v = random_pure(rng, dim)
        rho += wi * np.outer(v, v.conj())
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def matmul_loops(a, b):
    """Triple-loop matrix product, independent of numpy's matmul."""
    n, k = len(a), len(a[0])
    m = len(b[0])
    out = [[0j] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            out[i][j] = sum(complex(a[i][t]) * complex(b[t][j]) for t in range(k))
    return np.array(out)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
