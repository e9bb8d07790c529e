import numpy as np
import pytest
from scipy import sparse
from scipy.linalg import expm

from mflab.error import KrylovError
from mflab.fock import krylov_expm
from mflab.fock.krylov import KrylovStats, lanczos_exp


@pytest.fixture
def hermitian():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(120, 120)) + 1j * rng.normal(size=(120, 120))
    return (X + X.conj().T) / 20


@pytest.fixture
def psi():
    rng = np.random.default_rng(8)
    v = rng.normal(size=120) + 1j * rng.normal(size=120)
    return v / np.linalg.norm(v)


def test_matches_dense_exponential(hermitian, psi):
    for t in (0.1, 1.0, -0.7):
        expected = expm(-1j * t * hermitian) @ psi
        assert np.allclose(krylov_expm(hermitian, psi, t), expected, atol=1e-8)


def test_accepts_sparse_and_callables(hermitian, psi):
    expected = expm(-0.5j * hermitian) @ psi
    H = sparse.csr_matrix(hermitian)
    assert np.allclose(krylov_expm(H, psi, 0.5), expected, atol=1e-8)
    out = krylov_expm(lambda v: hermitian @ v, psi, 0.5)
    assert np.allclose(out, expected, atol=1e-8)


def test_zero_time_is_a_copy(hermitian, psi):
    out = krylov_expm(hermitian, psi, 0.0)
    assert np.array_equal(out, psi)
    assert out is not psi


def test_backward_step_inverts(hermitian, psi):
    forward = krylov_expm(hermitian, psi, 0.8)
    assert np.allclose(krylov_expm(hermitian, forward, -0.8), psi, atol=1e-8)
    assert np.linalg.norm(forward) == pytest.approx(1.0, abs=1e-9)


def test_large_norm_is_split(hermitian, psi):
    H = 50 * hermitian
    stats = []
    out = krylov_expm(H, psi, 1.0, stats=stats)
    assert len(stats) == 1
    assert isinstance(stats[0], KrylovStats)
    assert stats[0].halvings > 0
    assert stats[0].substeps > 1
    assert stats[0].max_error <= 1e-10
    assert np.allclose(out, expm(-1j * H) @ psi, atol=1e-7)


def test_invariant_subspace_is_exact():
    H = np.diag([1.0, 2.0, 3.0, 4.0])
    v = np.array([1.0, 0.0, 0.0, 0.0])
    out, error = lanczos_exp(lambda x: H @ x, v, 2.0)
    assert error == 0.0
    assert np.allclose(out, [np.exp(-2j), 0, 0, 0])


def test_zero_vector():
    out, error = lanczos_exp(lambda x: x, np.zeros(5), 1.0)
    assert np.array_equal(out, np.zeros(5))
    assert error == 0.0


def test_failure_is_reported(hermitian, psi):
    with pytest.raises(KrylovError):
        krylov_expm(hermitian, psi, 1.0, tol=0.0, m_max=2)
