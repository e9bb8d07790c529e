"""Second-quantized operators as sparse matrices on an occupation basis.

Every operator is assembled from normal-ordered monomials

    a*_{c_1} ... a*_{c_p} a_{d_1} ... a_{d_q}

evaluated on all basis states at once. Images that leave the basis
(truncation edge, another sector) are dropped, so products of creators
are exact below the edge only.
"""
import logging
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.linalg import eigh

from ..error import FockError
from ..space import Observable, SingleParticleSpace, require_modes
from .basis import OccupationBasis

logger = logging.getLogger('mflab')

HERMITIAN_TOLERANCE = 1e-12
NUMBER_COMMUTATOR_TOLERANCE = 1e-12
FULL_EIG_LIMIT = 4000

Term = Tuple[complex, Sequence[int], Sequence[int]]


class LadderKind(str, Enum):
    CREATE = 'create'
    ANNIHILATE = 'annihilate'


def _max_abs(matrix: sparse.spmatrix) -> float:
    if matrix.nnz == 0:
        return 0.0
    return float(np.max(np.abs(matrix.data)))


class SparseOperator:
    def __init__(
        self,
        basis: OccupationBasis,
        matrix: Union[sparse.spmatrix, np.ndarray],
        hermitian: bool = False,
        label: str = '',
    ) -> None:
        matrix = sparse.csr_matrix(matrix, dtype=complex)
        if matrix.shape != (basis.dim, basis.dim):
            raise FockError(
                'Operator %r of shape %s on a basis of dimension %d'
                % (label, matrix.shape, basis.dim)
            )
        matrix.sum_duplicates()
        matrix.eliminate_zeros()
        if hermitian:
            defect = _max_abs(matrix - matrix.conj().T)
            scale = max(1.0, _max_abs(matrix))
            if defect > HERMITIAN_TOLERANCE * scale:
                raise FockError(
                    'Operator %r is flagged Hermitian but A - A* has '
                    'entries of %.3e' % (label, defect)
                )
        self.basis = basis
        self.matrix: sparse.csr_matrix = matrix
        self.hermitian = hermitian
        self.label = label
        self._spectrum: Optional[Tuple[np.ndarray, np.ndarray]] = None

    @property
    def dim(self) -> int:
        return self.basis.dim

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return self.matrix @ psi

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def expectation(self, psi: np.ndarray) -> complex:
        return complex(np.vdot(psi, self.matrix @ psi))

    def max_abs(self) -> float:
        return _max_abs(self.matrix)

    def adjoint(self) -> 'SparseOperator':
        return SparseOperator(
            self.basis,
            self.matrix.conj().T,
            self.hermitian,
            self.label + '*',
        )

    def commutator(self, other: 'SparseOperator') -> 'SparseOperator':
        self._check_basis(other)
        return SparseOperator(
            self.basis,
            self.matrix @ other.matrix - other.matrix @ self.matrix,
            label='[%s, %s]' % (self.label, other.label),
        )

    def spectrum(self) -> Tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvectors, computed once."""
        if not self.hermitian:
            raise FockError('Spectrum of non-Hermitian %r' % self.label)
        if self.dim > FULL_EIG_LIMIT:
            raise FockError(
                'Full diagonalisation of %r is limited to dimension %d, '
                'got %d' % (self.label, FULL_EIG_LIMIT, self.dim)
            )
        if self._spectrum is None:
            self._spectrum = eigh(self.dense())
        return self._spectrum

    def _check_basis(self, other: 'SparseOperator') -> None:
        if other.basis is not self.basis and (
            other.basis.dim != self.basis.dim
            or other.basis.modes != self.basis.modes
        ):
            raise FockError(
                'Operators live on different bases: %r and %r'
                % (self.basis, other.basis)
            )

    def __add__(self, other: 'SparseOperator') -> 'SparseOperator':
        self._check_basis(other)
        return SparseOperator(
            self.basis,
            self.matrix + other.matrix,
            self.hermitian and other.hermitian,
            '%s + %s' % (self.label, other.label),
        )

    def __sub__(self, other: 'SparseOperator') -> 'SparseOperator':
        self._check_basis(other)
        return SparseOperator(
            self.basis,
            self.matrix - other.matrix,
            self.hermitian and other.hermitian,
            '%s - %s' % (self.label, other.label),
        )

    def __mul__(self, scalar: complex) -> 'SparseOperator':
        real = np.imag(scalar) == 0
        return SparseOperator(
            self.basis,
            self.matrix * scalar,
            self.hermitian and bool(real),
            self.label,
        )

    __rmul__ = __mul__

    def __neg__(self) -> 'SparseOperator':
        return self * -1.0

    def __matmul__(self, other: 'SparseOperator') -> 'SparseOperator':
        self._check_basis(other)
        return SparseOperator(
            self.basis,
            self.matrix @ other.matrix,
            label='%s %s' % (self.label, other.label),
        )

    def __repr__(self) -> str:
        return 'SparseOperator(%r, dim=%d, nnz=%d)' % (
            self.label,
            self.dim,
            self.matrix.nnz,
        )


def monomial_entries(
    basis: OccupationBasis,
    creators: Sequence[int],
    annihilators: Sequence[int],
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(rows, cols, values) of a*_{c_1}...a*_{c_p} a_{d_1}...a_{d_q}."""
    occ = np.array(basis.occupations, dtype=np.int64)
    amp = np.ones(basis.dim)
    for a in reversed(annihilators):
        amp = amp * np.sqrt(np.maximum(occ[:, a], 0))
        occ[:, a] -= 1
    for a in reversed(creators):
        occ[:, a] += 1
        amp = amp * np.sqrt(np.maximum(occ[:, a], 0))
    keep = amp != 0
    cols = np.flatnonzero(keep)
    rows = basis.indices(occ[keep])
    inside = rows >= 0
    return rows[inside], cols[inside], amp[keep][inside]


def assemble(
    basis: OccupationBasis,
    terms: Iterable[Term],
    hermitian: bool = False,
    label: str = '',
) -> SparseOperator:
    rows, cols, vals = [], [], []
    for coef, creators, annihilators in terms:
        if coef == 0:
            continue
        for a in list(creators) + list(annihilators):
            if not 0 <= a < basis.modes:
                raise FockError(
                    'Mode %d out of range 0..%d' % (a, basis.modes - 1)
                )
        r, c, v = monomial_entries(basis, creators, annihilators)
        rows.append(r)
        cols.append(c)
        vals.append(coef * v)
    if rows:
        matrix = sparse.coo_matrix(
            (
                np.concatenate(vals).astype(complex),
                (np.concatenate(rows), np.concatenate(cols)),
            ),
            shape=(basis.dim, basis.dim),
        )
    else:
        matrix = sparse.csr_matrix((basis.dim, basis.dim), dtype=complex)
    return SparseOperator(basis, matrix, hermitian, label)


def _require_truncated(basis: OccupationBasis, what: str) -> None:
    if basis.is_fixed:
        raise FockError(
            '%s leaves the fixed-N sector, use a truncated basis' % what
        )


def ladder(
    basis: OccupationBasis, a: int, kind: str = LadderKind.ANNIHILATE.value
) -> SparseOperator:
    kind = LadderKind(kind).value
    _require_truncated(basis, 'Ladder operator')
    if kind == LadderKind.CREATE:
        return assemble(basis, [(1.0, [a], [])], label='a*_%d' % a)
    return assemble(basis, [(1.0, [], [a])], label='a_%d' % a)


def _coefficients(basis: OccupationBasis, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.shape != (basis.modes,):
        raise FockError(
            'Field of shape %s on %d modes' % (f.shape, basis.modes)
        )
    return f


def ladder_field(
    basis: OccupationBasis,
    f: np.ndarray,
    kind: str = LadderKind.ANNIHILATE.value,
) -> SparseOperator:
    """a*(f) = sum_a f_a a*_a; a(f) = sum_a conj(f_a) a_a is antilinear."""
    kind = LadderKind(kind).value
    _require_truncated(basis, 'Ladder operator')
    f = _coefficients(basis, f)
    if kind == LadderKind.CREATE:
        terms = [(f[a], [a], []) for a in range(basis.modes)]
        return assemble(basis, terms, label='a*(f)')
    terms = [(np.conj(f[a]), [], [a]) for a in range(basis.modes)]
    return assemble(basis, terms, label='a(f)')


def field_operator(basis: OccupationBasis, f: np.ndarray) -> SparseOperator:
    """phi(f) = a*(f) + a(f)."""
    f = _coefficients(basis, f)
    _require_truncated(basis, 'Field operator')
    terms = [(f[a], [a], []) for a in range(basis.modes)] + [
        (np.conj(f[a]), [], [a]) for a in range(basis.modes)
    ]
    return assemble(basis, terms, hermitian=True, label='phi(f)')


def number_operator(basis: OccupationBasis) -> SparseOperator:
    return SparseOperator(
        basis,
        sparse.diags(basis.totals.astype(complex)),
        hermitian=True,
        label='N',
    )


def second_quantize(
    basis: OccupationBasis, O: Union[Observable, np.ndarray]
) -> SparseOperator:
    """dGamma(O) = sum_ab O_ab a*_a a_b."""
    if isinstance(O, Observable):
        matrix, label = O.matrix, 'dG(%s)' % O.label
    else:
        matrix, label = np.asarray(O, dtype=complex), 'dG(O)'
    if matrix.shape != (basis.modes, basis.modes):
        raise FockError(
            'One-body matrix of shape %s on %d modes'
            % (matrix.shape, basis.modes)
        )
    scale = max(1.0, float(np.max(np.abs(matrix))))
    hermitian = bool(
        np.max(np.abs(matrix - matrix.conj().T))
        <= HERMITIAN_TOLERANCE * scale
    )
    terms = [
        (matrix[a, b], [a], [b])
        for a in range(basis.modes)
        for b in range(basis.modes)
        if matrix[a, b] != 0
    ]
    return assemble(basis, terms, hermitian=hermitian, label=label)


def number_commutator_defect(op: SparseOperator) -> float:
    """max |[A, N]| read off the entries: [A, N]_ij = A_ij (n_j - n_i)."""
    coo = op.matrix.tocoo()
    if coo.nnz == 0:
        return 0.0
    totals = op.basis.totals
    change = totals[coo.col] - totals[coo.row]
    return float(np.max(np.abs(coo.data * change)))


def build_hamiltonian(
    space: SingleParticleSpace, N: int, basis: OccupationBasis
) -> SparseOperator:
    """dGamma(K) + 1/(2N) sum W_abcd a*_a a*_b a_d a_c."""
    modes = require_modes(space)
    if modes.dim != basis.modes:
        raise FockError(
            'Space has %d modes, the basis %d' % (modes.dim, basis.modes)
        )
    if N < 1:
        raise FockError('N must be >= 1, got %r' % N)
    W = modes.interaction
    idx = np.argwhere(W != 0)
    terms = [
        (W[a, b, c, d] / (2.0 * N), [a, b], [d, c])
        for a, b, c, d in idx.tolist()
    ]
    kinetic = second_quantize(basis, modes.kinetic)
    interaction = assemble(basis, terms, hermitian=True, label='V_N')
    H = kinetic + interaction
    H.label = 'H_%d' % N
    defect = number_commutator_defect(H)
    if defect > NUMBER_COMMUTATOR_TOLERANCE:
        raise FockError(
            'Hamiltonian does not commute with the number operator '
            '(defect %.3e)' % defect
        )
    logger.debug('Assembled %r on %r', H, basis)
    return H
