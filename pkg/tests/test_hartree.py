import numpy as np
import pytest

from mflab.error import HartreeError
from mflab.hartree import (
    InitialStateConfig,
    evolve_hartree,
    hartree_energy,
    initial_state,
    time_steps,
)
from mflab.space import KernelConfig, make_fourier_mode_space, make_grid_space


def test_time_steps():
    assert time_steps(1.0, 0.25) == 4
    assert time_steps(0.1, 0.005) == 20
    with pytest.raises(HartreeError):
        time_steps(1.0, 0.3)
    with pytest.raises(HartreeError):
        time_steps(1.0, 0.0)


def test_free_flow_is_kinetic_phase(free_two_mode, phi0):
    traj = evolve_hartree(free_two_mode, phi0, 1.0, 0.01)
    for t in (0.0, 0.5, 1.0, 0.123):
        exact = phi0 * np.exp(-1j * np.array([0.0, 1.0]) * t)
        assert np.allclose(traj.at(t), exact, atol=1e-9)
    assert traj.steps == 100
    assert traj.T == pytest.approx(1.0)


def test_interacting_flow_conserves(two_mode, phi0):
    traj = evolve_hartree(two_mode, phi0, 1.0, 1e-3)
    assert traj.norm_deviation() < 1e-9
    assert traj.energy_drift() < 1e-9
    assert traj.energy[0] == pytest.approx(hartree_energy(two_mode, phi0))
    assert traj.node(0.5) == 500
    assert traj.node(0.5004) is None


def test_interpolation_matches_refined_solve(two_mode, phi0):
    coarse = evolve_hartree(two_mode, phi0, 1.0, 0.01)
    fine = evolve_hartree(two_mode, phi0, 1.0, 0.005)
    # 0.335 is a node of the fine grid only
    assert np.allclose(coarse.at(0.335), fine.at(0.335), atol=1e-8)


def test_renormalize(two_mode, phi0):
    traj = evolve_hartree(two_mode, phi0, 1.0, 0.05, renormalize=True)
    assert np.allclose(
        [two_mode.norm(c) for c in traj.states], 1.0, atol=1e-14
    )


def test_errors(two_mode, phi0):
    with pytest.raises(HartreeError):
        evolve_hartree(two_mode, 2 * phi0, 1.0, 0.01)
    with pytest.raises(HartreeError):
        evolve_hartree(two_mode, phi0, 1.0, 0.01, method='strang')
    with pytest.raises(HartreeError):
        evolve_hartree(two_mode, phi0, 1.0, 0.5, norm_tolerance=1e-14)
    traj = evolve_hartree(two_mode, phi0, 0.1, 0.01)
    with pytest.raises(HartreeError):
        traj.at(0.2)
    with pytest.raises(HartreeError):
        traj.at(-0.1)


def test_strang_exact_on_free_plane_wave():
    space = make_grid_space(1, 16, 2 * np.pi, KernelConfig())
    phi = initial_state(
        space, InitialStateConfig(kind='plane_wave', k=[1])
    )
    assert space.norm(phi) == pytest.approx(1.0)
    traj = evolve_hartree(space, phi, 1.0, 0.1, method='strang')
    assert np.allclose(traj.final, np.exp(-1j) * phi, atol=1e-12)


def test_strang_and_rk4_agree_on_grid():
    kernel = KernelConfig(kind='gaussian', v0=1.0, sigma=0.5)
    space = make_grid_space(1, 16, 2 * np.pi, kernel)
    phi = initial_state(
        space, InitialStateConfig(kind='gaussian', width=0.8, momentum=1)
    )
    rk4 = evolve_hartree(space, phi, 0.5, 1e-3)
    strang = evolve_hartree(space, phi, 0.5, 1e-3, method='strang')
    assert space.norm(rk4.final - strang.final) < 1e-4
    assert strang.energy_drift() < 1e-4


def test_initial_states(two_mode):
    phi = initial_state(
        two_mode, InitialStateConfig(re=[3.0, 4.0], im=[0.0, 0.0])
    )
    assert np.allclose(phi, [0.6, 0.8])
    phi = initial_state(
        two_mode, InitialStateConfig(kind='plane_wave', k=[1])
    )
    assert np.allclose(phi, [0.0, 1.0])
    with pytest.raises(HartreeError):
        initial_state(two_mode, InitialStateConfig(re=[1.0, 0.0, 0.0]))
    with pytest.raises(HartreeError):
        initial_state(two_mode, InitialStateConfig(re=[1.0, 0.0], im=[0.0]))
    with pytest.raises(HartreeError):
        initial_state(two_mode, InitialStateConfig(kind='gaussian'))


def test_gaussian_projected_onto_modes():
    space = make_fourier_mode_space(2 * np.pi, 2, KernelConfig())
    phi = initial_state(
        space, InitialStateConfig(kind='gaussian', width=1.0)
    )
    assert space.norm(phi) == pytest.approx(1.0)
    # centred at pi: the k and -k amplitudes agree
    assert np.allclose(phi, phi[::-1])
    with pytest.raises(HartreeError):
        initial_state(space, InitialStateConfig(kind='plane_wave', k=[5]))
