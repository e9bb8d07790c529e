import numpy as np
import pytest

from mflab.bogoliubov import BogoliubovPair, propagate_theta
from mflab.covariance import (
    CovarianceMatrix,
    commuting_family,
    covariance_at,
    fluctuation_vector,
    gaussian_charfn,
    gaussian_density,
    gaussian_expectation,
    tau_grid,
)
from mflab.error import CovarianceError
from mflab.hartree import evolve_hartree
from mflab.space import Observable, ObservableConfig, make_observable


def _identity_pair(space, phi):
    theta = np.eye(2 * space.dim, dtype=complex)
    return BogoliubovPair(space, theta, 0.0, phi, phi)


def _observables(space, *kinds):
    result = []
    for kind in kinds:
        if kind == 'n0':
            cfg = ObservableConfig(kind='number', mode=0)
        else:
            cfg = ObservableConfig(kind=kind)
        result.append(make_observable(space, cfg))
    return result


def test_commuting_family_is_real(two_mode):
    phi = np.array([0.8, 0.6], dtype=complex)
    pair = _identity_pair(two_mode, phi)
    cov = covariance_at(pair, phi, _observables(two_mode, 'sigma_z', 'n0'))
    assert cov.commuting is True
    assert np.allclose(cov.sigma, [[0.9216, 0.4608], [0.4608, 0.2304]])
    assert cov.imag_max() < 1e-15
    assert cov.labels == ['sigma_z', 'number']
    assert cov.eigs_P[0] > -1e-12


def test_non_commuting_family_is_complex(two_mode):
    phi = np.array([0.8, 0.6j])
    pair = _identity_pair(two_mode, phi)
    observables = _observables(two_mode, 'sigma_x', 'sigma_z')
    cov = covariance_at(pair, phi, observables)
    assert cov.commuting is False
    assert cov.sigma[0, 1].real == pytest.approx(0.0, abs=1e-14)
    assert cov.sigma[0, 1].imag == pytest.approx(-0.96)
    # symmetric rather than Hermitian
    assert cov.sigma[1, 0] == cov.sigma[0, 1]
    assert cov.sigma[0, 0] == pytest.approx(1.0)
    assert cov.sigma[1, 1] == pytest.approx(1 - 0.28 ** 2)

    exported = cov.export()
    assert exported['k'] == 2
    assert exported['im'][0][1] == pytest.approx(-0.96)
    assert len(exported['eigs_reP']) == 2


def test_covariance_along_trajectory(model_series):
    space, series = model_series
    observables = _observables(space, 'sigma_x', 'sigma_z')
    for pair in series.pairs:
        cov = covariance_at(pair, pair.phi_t, observables)
        assert cov.t == pair.t
        assert cov.eigs_P[0] > -1e-10


@pytest.fixture
def model_series(two_mode, phi0):
    trajectory = evolve_hartree(two_mode, phi0, 0.5, 0.005)
    return two_mode, propagate_theta(trajectory, record_every=20)


def test_state_must_belong_to_pair(two_mode, phi0):
    pair = _identity_pair(two_mode, phi0)
    sz = _observables(two_mode, 'sigma_z')[0]
    with pytest.raises(CovarianceError):
        fluctuation_vector(pair, np.array([0.6, 0.8]), sz)
    g = fluctuation_vector(pair, phi0, sz)
    assert g.overlap == pytest.approx(0.28)
    assert g.label == 'sigma_z'


def test_commuting_family(two_mode):
    assert commuting_family(_observables(two_mode, 'sigma_z', 'n0'))
    assert not commuting_family(
        _observables(two_mode, 'sigma_z', 'n0', 'sigma_x')
    )
    assert commuting_family([])


def test_gaussian_charfn():
    sigma = np.array([[1.0, 0.3j], [0.3j, 0.5]])
    assert gaussian_charfn(sigma, np.zeros(2)) == pytest.approx(1.0)
    tau = np.array([1.0, 2.0])
    expected = np.exp(-0.5 * (1.0 + 2 * 0.6j + 2.0))
    assert gaussian_charfn(sigma, tau) == pytest.approx(expected)

    grid = tau_grid(3.0, 7, 2)
    assert grid.shape == (7, 7, 2)
    values = gaussian_charfn(sigma, grid)
    assert values.shape == (7, 7)
    assert values[3, 3] == pytest.approx(1.0)


def test_gaussian_density_is_normalised():
    sigma = np.eye(2) + 1j * np.array([[0.0, 0.3], [0.3, 0.0]])
    axis = np.linspace(-10, 10, 201)
    step = axis[1] - axis[0]
    x = np.stack(np.meshgrid(axis, axis, indexing='ij'), -1)
    total = np.sum(gaussian_density(sigma, x)) * step ** 2
    assert total == pytest.approx(1.0, abs=1e-8)


def test_gaussian_density_real_case():
    sigma = np.array([[2.0]])
    value = gaussian_density(sigma, np.array([1.0]))
    assert value == pytest.approx(np.exp(-0.25) / np.sqrt(4 * np.pi))


def test_gaussian_density_needs_positive_real_part():
    with pytest.raises(CovarianceError):
        gaussian_density(np.array([[1.0, 0.0], [0.0, 0.0]]), np.zeros(2))


def _hat(tau):
    # transform of exp(-x^2 / 2)
    return np.exp(-(tau ** 2) / 2) / np.sqrt(2 * np.pi)


def test_gaussian_expectation_one_dimensional():
    tau = np.linspace(-12, 12, 241)
    for s in (0.5, 1.0, 3.0):
        result = gaussian_expectation(np.array([[s]]), tau, [_hat(tau)])
        assert result.value == pytest.approx(1 / np.sqrt(1 + s), abs=1e-10)
        assert result.error < 1e-8
        assert result.warnings == []


def test_gaussian_expectation_complex_covariance():
    sigma = np.array([[1.0, 0.3j], [0.3j, 0.5]])
    tau = np.linspace(-10, 10, 121)
    result = gaussian_expectation(sigma, tau, [_hat(tau), _hat(tau)])
    assert result.value == pytest.approx(1 / np.sqrt(3.09), abs=1e-9)


def test_gaussian_expectation_errors(caplog):
    tau = np.linspace(-5, 5, 11)
    sigma = np.eye(2)
    with pytest.raises(CovarianceError):
        gaussian_expectation(sigma, tau, [_hat(tau)])
    with pytest.raises(CovarianceError):
        gaussian_expectation(np.eye(7), tau, [_hat(tau)] * 7)
    with pytest.raises(CovarianceError):
        gaussian_expectation(sigma, np.array([0.0, 1.0, 3.0]), [_hat(tau)] * 2)
    with pytest.raises(CovarianceError):
        bumpy = np.array([0.0, 0.1, 0.2, 0.4, 0.5, 0.6])
        gaussian_expectation(np.eye(1), bumpy, [np.ones(6)])

    short = np.linspace(-1, 1, 11)
    result = gaussian_expectation(np.eye(1), short, [_hat(short)])
    assert len(result.warnings) == 1
    assert 'does not decay' in caplog.text


def test_covariance_matrix_wrapper():
    cov = CovarianceMatrix(np.array([[2.0, 1j], [1j, 1.0]]), t=0.25)
    assert cov.k == 2
    assert np.allclose(cov.P, [[2.0, 0.0], [0.0, 1.0]])
    assert np.allclose(cov.R, [[0.0, 1.0], [1.0, 0.0]])
    assert cov.imag_max() == 1.0
    assert cov.labels == []


def _random_observables(rng, dim, count):
    result = []
    for i in range(count):
        z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        result.append(Observable(z + z.conj().T, 'random_%d' % i))
    return result


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_covariance_ignores_identity_shifts(model_series, seed):
    space, series = model_series
    rng = np.random.default_rng(seed)
    observables = _random_observables(rng, space.dim, 2)
    shifts = rng.normal(scale=3.0, size=2)
    shifted = [
        Observable(o.matrix + c * np.eye(space.dim), o.label)
        for o, c in zip(observables, shifts)
    ]
    for pair in series.pairs:
        plain = covariance_at(pair, pair.phi_t, observables)
        moved = covariance_at(pair, pair.phi_t, shifted)
        assert np.allclose(moved.sigma, plain.sigma, atol=1e-7)


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_covariance_scales_linearly(model_series, seed):
    space, series = model_series
    rng = np.random.default_rng(seed)
    a, b = _random_observables(rng, space.dim, 2)
    s = rng.uniform(-4.0, 4.0)
    scaled = Observable(s * a.matrix, a.label)
    for pair in series.pairs:
        sigma = covariance_at(pair, pair.phi_t, [a, b]).sigma
        rescaled = covariance_at(pair, pair.phi_t, [scaled, b]).sigma
        assert rescaled[0, 1] == pytest.approx(s * sigma[0, 1], abs=1e-10)
        assert rescaled[1, 0] == pytest.approx(s * sigma[1, 0], abs=1e-10)
        assert rescaled[0, 0] == pytest.approx(s ** 2 * sigma[0, 0])
        assert rescaled[1, 1] == pytest.approx(sigma[1, 1], abs=1e-12)
