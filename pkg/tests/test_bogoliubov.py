import numpy as np
import pytest

from mflab.bogoliubov import (
    BogoliubovPair,
    apply_B,
    apply_D,
    assemble_generator,
    propagate_theta,
    structure_residuals,
)
from mflab.error import BogoliubovError
from mflab.hartree import evolve_hartree
from mflab.space import KernelConfig, make_fourier_mode_space


@pytest.fixture
def series(two_mode, phi0):
    trajectory = evolve_hartree(two_mode, phi0, 1.0, 1e-3)
    return propagate_theta(trajectory, record_every=100)


def test_free_theta_is_kinetic_flow(free_two_mode, phi0):
    trajectory = evolve_hartree(free_two_mode, phi0, 1.0, 0.01)
    final = propagate_theta(trajectory).final
    assert np.allclose(final.U, np.diag([1.0, np.exp(1j)]), atol=1e-9)
    assert np.allclose(final.V, 0)


def test_residuals_stay_small(series):
    worst = series.max_residuals()
    assert worst.r1 < 1e-8
    assert worst.r2 < 1e-8
    assert worst.r3 < 1e-6
    assert len(series.pairs) == 11
    assert np.allclose(series.times, np.linspace(0, 1, 11))


def test_pair_maps_phi_t_back(series):
    pair = series.pair_at(0.5)
    assert pair.t == pytest.approx(0.5)
    assert np.allclose(pair.apply(pair.phi_t), pair.phi0, atol=1e-6)
    with pytest.raises(BogoliubovError):
        series.pair_at(0.55)


def test_initial_pair_is_identity(series):
    first = series.pairs[0]
    assert np.allclose(first.U, np.eye(2))
    assert np.allclose(first.V, 0)
    assert tuple(first.residuals) == (0.0, 0.0, 0.0)


def test_magnus_integrator(two_mode, phi0):
    trajectory = evolve_hartree(two_mode, phi0, 0.5, 1e-3)
    magnus = propagate_theta(
        trajectory, integrator='midpoint_magnus', record_every=500
    )
    rk4 = propagate_theta(trajectory, record_every=500)
    assert magnus.integrator == 'midpoint_magnus'
    assert magnus.max_residuals().r1 < 1e-8
    assert np.allclose(magnus.final.theta, rk4.final.theta, atol=1e-5)


def test_generator_blocks(two_mode, phi0):
    blocks = assemble_generator(two_mode, phi0)
    defects = structure_residuals(two_mode, blocks)
    assert defects['D'] < 1e-14
    assert defects['B'] < 1e-14
    f = np.array([0.3 - 0.2j, 1.0j])
    assert np.allclose(blocks.D @ f, apply_D(two_mode, phi0, f))
    assert np.allclose(blocks.B @ f, apply_B(two_mode, phi0, f))
    assert blocks.matrix(two_mode).shape == (4, 4)


def test_generator_on_fourier_modes():
    space = make_fourier_mode_space(
        2 * np.pi, 1, KernelConfig(kind='cosine', v0=0.7)
    )
    phi = np.array([0.3 + 0.1j, 0.9, 0.3 - 0.1j])
    phi = phi / np.linalg.norm(phi)
    blocks = assemble_generator(space, phi)
    defects = structure_residuals(space, blocks)
    assert max(defects.values()) < 1e-12


def test_unnormalised_state_is_rejected(two_mode, phi0):
    with pytest.raises(BogoliubovError):
        apply_D(two_mode, 2 * phi0, phi0)
    with pytest.raises(BogoliubovError):
        apply_B(two_mode, 2 * phi0, phi0)


def test_pair_residuals_of_a_bad_matrix(two_mode, phi0):
    theta = np.eye(4, dtype=complex)
    theta[2, 0] = 0.5
    pair = BogoliubovPair(two_mode, theta, 0.0, phi0, phi0)
    assert pair.residuals.r1 > 0.1
