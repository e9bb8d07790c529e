import numpy as np
import pytest

from mflab.error import FockError, SpaceError
from mflab.fock import (
    OccupationBasis,
    SparseOperator,
    build_hamiltonian,
    field_operator,
    ladder,
    ladder_field,
    number_operator,
    second_quantize,
)
from mflab.fock.operators import assemble, number_commutator_defect
from mflab.space import KernelConfig, make_fourier_mode_space, make_grid_space


def test_ladder_needs_truncated_basis():
    with pytest.raises(FockError):
        ladder(OccupationBasis.fixed(2, 2), 0)
    with pytest.raises(FockError):
        field_operator(OccupationBasis.fixed(2, 2), np.ones(2))


def test_canonical_commutator_below_edge():
    basis = OccupationBasis.truncated(1, 5)
    a = ladder(basis, 0)
    a_star = ladder(basis, 0, 'create')
    assert np.allclose(a_star.dense(), a.dense().conj().T)
    diag = np.diag(a.commutator(a_star).dense()).real
    assert np.allclose(diag[:-1], 1.0)
    assert diag[-1] == pytest.approx(-5.0)
    lowered = a.dense() @ basis.state([3])
    assert np.allclose(lowered, np.sqrt(3) * basis.state([2]))


def test_ladder_fields():
    basis = OccupationBasis.truncated(2, 3)
    f = np.array([0.5 + 0.5j, -1.0])
    create = ladder_field(basis, f, 'create')
    annihilate = ladder_field(basis, f)
    assert np.allclose(create.dense().conj().T, annihilate.dense())
    phi = field_operator(basis, f)
    assert phi.hermitian
    assert np.allclose(phi.dense(), (create + annihilate).dense())
    with pytest.raises(FockError):
        ladder_field(basis, np.ones(3))
    with pytest.raises(ValueError):
        ladder(basis, 0, 'destroy')


def test_number_operator_is_second_quantized_identity():
    basis = OccupationBasis.truncated(3, 3)
    N = number_operator(basis)
    assert np.allclose(N.dense(), second_quantize(basis, np.eye(3)).dense())
    assert np.allclose(np.diag(N.dense()).real, basis.totals)
    assert N.hermitian


def test_second_quantize_checks():
    basis = OccupationBasis.fixed(2, 3)
    with pytest.raises(FockError):
        second_quantize(basis, np.eye(3))
    upper = second_quantize(basis, np.array([[0, 1], [0, 0]]))
    assert not upper.hermitian
    assert number_commutator_defect(upper) == 0.0


def test_two_mode_hamiltonian(two_mode):
    basis = OccupationBasis.fixed(2, 2)
    H = build_hamiltonian(two_mode, 2, basis)
    assert H.hermitian
    assert H.label == 'H_2'
    expected = [[0.0, 0.0, 0.25], [0.0, 1.25, 0.0], [0.25, 0.0, 2.0]]
    assert np.allclose(H.dense(), expected)


def test_hamiltonian_conserves_number():
    space = make_fourier_mode_space(
        2 * np.pi, 1, KernelConfig(kind='cosine', v0=1.0)
    )
    basis = OccupationBasis.truncated(3, 3)
    H = build_hamiltonian(space, 3, basis)
    assert number_commutator_defect(H) == 0.0
    N = number_operator(basis)
    assert H.commutator(N).max_abs() < 1e-12


def test_hamiltonian_errors(two_mode):
    with pytest.raises(FockError):
        build_hamiltonian(two_mode, 2, OccupationBasis.fixed(3, 2))
    with pytest.raises(FockError):
        build_hamiltonian(two_mode, 0, OccupationBasis.fixed(2, 0))
    grid = make_grid_space(1, 4, 1.0, KernelConfig())
    with pytest.raises(SpaceError):
        build_hamiltonian(grid, 2, OccupationBasis.fixed(4, 2))


def test_sparse_operator_algebra():
    basis = OccupationBasis.truncated(1, 3)
    N = number_operator(basis)
    twice = 2 * N
    assert twice.hermitian
    assert np.allclose(twice.dense(), 2 * N.dense())
    assert not (1j * N).hermitian
    assert np.allclose((N - N).dense(), 0)
    assert np.allclose((-N).dense(), -N.dense())
    assert np.allclose((N @ N).dense(), N.dense() @ N.dense())
    psi = basis.state([2])
    assert N.expectation(psi) == pytest.approx(2.0)

    evals, _ = N.spectrum()
    assert np.allclose(evals, [0, 1, 2, 3])
    with pytest.raises(FockError):
        ladder(basis, 0).spectrum()

    other = number_operator(OccupationBasis.truncated(2, 1))
    with pytest.raises(FockError):
        N + other


def test_sparse_operator_validation():
    basis = OccupationBasis.truncated(1, 2)
    with pytest.raises(FockError):
        SparseOperator(basis, np.eye(2))
    with pytest.raises(FockError):
        SparseOperator(basis, np.triu(np.ones((3, 3))), hermitian=True)
    with pytest.raises(FockError):
        assemble(basis, [(1.0, [1], [])])
    empty = assemble(basis, [(0.0, [0], [])])
    assert empty.matrix.nnz == 0
    assert empty.max_abs() == 0.0
