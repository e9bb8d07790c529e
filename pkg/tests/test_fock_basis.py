import numpy as np
import pytest

from mflab.error import FockError
from mflab.fock import OccupationBasis, sector_dimension, truncated_dimension
from mflab.fock.basis import sector_occupations


def test_dimensions():
    assert sector_dimension(3, 4) == 15
    assert sector_dimension(1, 9) == 1
    assert truncated_dimension(2, 3) == 10
    assert OccupationBasis.fixed(3, 4).dim == 15
    assert OccupationBasis.truncated(2, 3).dim == 10


def test_sector_order():
    assert sector_occupations(2, 2).tolist() == [[2, 0], [1, 1], [0, 2]]
    occ = sector_occupations(3, 2)
    assert occ[0].tolist() == [2, 0, 0]
    assert occ[-1].tolist() == [0, 0, 2]
    assert np.all(occ.sum(axis=1) == 2)
    assert sector_occupations(1, 5).tolist() == [[5]]
    assert sector_occupations(3, 0).tolist() == [[0, 0, 0]]


def test_truncated_layout():
    basis = OccupationBasis.truncated(2, 2)
    assert basis.occupations.tolist() == [
        [0, 0],
        [1, 0],
        [0, 1],
        [2, 0],
        [1, 1],
        [0, 2],
    ]
    assert basis.sector(1) == slice(1, 3)
    assert basis.totals.tolist() == [0, 1, 1, 2, 2, 2]
    assert not basis.is_fixed
    assert basis.vacuum()[0] == 1.0
    with pytest.raises(ValueError):
        basis.occupations[0, 0] = 3


def test_indices():
    basis = OccupationBasis.truncated(2, 2)
    assert basis.index([1, 1]) == 4
    found = basis.indices(np.array([[3, 0], [0, -1], [1, 1], [0, 2]]))
    assert found.tolist() == [-1, -1, 4, 5]
    with pytest.raises(FockError):
        basis.index([2, 1])

    fixed = OccupationBasis.fixed(2, 2)
    assert fixed.is_fixed
    assert fixed.indices(np.array([[1, 0], [0, 2]])).tolist() == [-1, 2]
    psi = fixed.state([1, 1])
    assert psi.tolist() == [0, 1, 0]
    with pytest.raises(FockError):
        fixed.sector(1)
    with pytest.raises(FockError):
        fixed.vacuum()


def test_lookup_for_many_modes():
    basis = OccupationBasis.truncated(40, 2)
    assert basis.dim == 1 + 40 + 820
    occupation = np.zeros(40, dtype=int)
    occupation[5] = occupation[7] = 1
    i = basis.index(occupation)
    assert basis.occupations[i].tolist() == occupation.tolist()
    occupation[9] = 1
    assert basis.indices(occupation).tolist() == [-1]


def test_errors():
    with pytest.raises(FockError):
        OccupationBasis(0, particles=1)
    with pytest.raises(FockError):
        OccupationBasis(2, particles=1, n_max=2)
    with pytest.raises(FockError):
        OccupationBasis(2)
    with pytest.raises(FockError):
        OccupationBasis.fixed(2, -1)
    with pytest.raises(FockError):
        OccupationBasis.truncated(2, -1)


def test_repr():
    assert repr(OccupationBasis.fixed(2, 3)) == (
        'OccupationBasis(m=2, N=3, dim=4)'
    )
    assert 'n_max=2' in repr(OccupationBasis.truncated(2, 2))
