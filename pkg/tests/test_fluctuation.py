import numpy as np
import pytest

from mflab.error import FockError
from mflab.fock import (
    ManyBodyState,
    OccupationBasis,
    QuadraticDynamics,
    evolve_quadratic,
    fluctuation_state,
    number_growth,
    phase_aligned_distance,
)
from mflab.fock.fluctuation import embed
from mflab.hartree import evolve_hartree


@pytest.fixture
def trajectory(two_mode, phi0):
    return evolve_hartree(two_mode, phi0, 0.2, 0.01)


def test_fluctuation_state_starts_in_vacuum(trajectory):
    basis = OccupationBasis.truncated(2, 31)
    state = fluctuation_state(trajectory, 1, 0.0, basis)
    assert abs(state.overlap(ManyBodyState.vacuum(basis))) == pytest.approx(
        1.0, abs=1e-8
    )


def test_number_growth_stays_normalised(trajectory):
    basis = OccupationBasis.truncated(2, 31)
    states = number_growth(trajectory, 1, [0.0, 0.1, 0.2], basis)
    assert len(states) == 3
    for state in states:
        assert state.norm == pytest.approx(1.0, abs=1e-5)
        number, number_sq = state.number_moments()
        assert 0 <= number <= number_sq + 1e-12


def test_fluctuation_state_needs_room(trajectory):
    with pytest.raises(FockError):
        fluctuation_state(trajectory, 1, 0.1, OccupationBasis.truncated(2, 5))
    with pytest.raises(FockError):
        fluctuation_state(trajectory, 1, 0.1, OccupationBasis.fixed(2, 1))
    with pytest.raises(FockError):
        wide = OccupationBasis.truncated(3, 40)
        fluctuation_state(trajectory, 1, 0.1, wide)


def test_free_quadratic_dynamics_keeps_vacuum(free_two_mode, phi0):
    free = evolve_hartree(free_two_mode, phi0, 0.5, 0.05)
    basis = OccupationBasis.truncated(2, 4)
    state = evolve_quadratic(free, basis, 0.5)
    vacuum = ManyBodyState.vacuum(basis)
    assert phase_aligned_distance(state, vacuum) < 1e-10


def test_quadratic_schemes_agree(trajectory):
    basis = OccupationBasis.truncated(2, 8)
    dynamics = QuadraticDynamics(trajectory.space, basis)
    generator = dynamics.generator(trajectory.phi0)
    assert generator.hermitian
    cf4 = dynamics.evolve(trajectory, 0.2)
    midpoint = dynamics.evolve(trajectory, 0.2, method='midpoint')
    assert cf4.norm == pytest.approx(1.0, abs=1e-6)
    assert phase_aligned_distance(cf4, midpoint) < 1e-3
    # the pair terms create particles out of the vacuum
    assert cf4.number_moments()[0] > 0


def test_evolve_columns(trajectory):
    basis = OccupationBasis.truncated(2, 6)
    dynamics = QuadraticDynamics(trajectory.space, basis)
    columns = np.zeros((basis.dim, 2), dtype=complex)
    columns[0, 0] = 1.0
    columns[1, 1] = 1.0
    out = dynamics.evolve_columns(trajectory, [0.0, 0.1], columns)
    assert len(out) == 2
    assert np.allclose(out[0], columns)
    single = dynamics.evolve(trajectory, 0.1)
    assert np.allclose(out[1][:, 0], single.coefficients, atol=1e-12)

    with pytest.raises(FockError):
        dynamics.evolve_columns(trajectory, [0.1], columns[:-1])
    with pytest.raises(FockError):
        dynamics.evolve_columns(trajectory, [0.1, 0.05], columns)
    with pytest.raises(FockError):
        QuadraticDynamics(trajectory.space, OccupationBasis.fixed(2, 2))


def test_embed_and_distance():
    small = OccupationBasis.truncated(2, 1)
    large = OccupationBasis.truncated(2, 2)
    a = ManyBodyState(small, np.array([0.6, 0.8j, 0.0]))
    on_large = embed(a, large)
    assert on_large.tolist() == [0.6, 0.8j, 0, 0, 0, 0]
    assert embed(a, small) is a.coefficients

    b = ManyBodyState(large, 1j * on_large)
    assert phase_aligned_distance(a, b) == pytest.approx(0.0, abs=1e-12)
    c = ManyBodyState(large, large.state([2, 0]))
    assert phase_aligned_distance(a, c) == pytest.approx(np.sqrt(2))

    with pytest.raises(FockError):
        embed(a, OccupationBasis.truncated(3, 1))
