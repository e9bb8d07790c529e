import logging
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigvalsh
from scipy.special import gammaln

from ..error import FockError
from ..logger import Span, wrap2span
from ..misc import ctx_span_get
from ..space import Observable
from .basis import OccupationBasis
from .krylov import krylov_expm
from .operators import (
    FULL_EIG_LIMIT,
    SparseOperator,
    monomial_entries,
    second_quantize,
)
from .weyl import monomial_amplitudes

logger = logging.getLogger('mflab')

NORM_TOLERANCE = 1e-9
PROJECTION_TOLERANCE = 1e-8
DENSITY_TOLERANCE = 1e-10
CHARFN_TOLERANCE = 1e-9


class PropagationMethod(str, Enum):
    FULL_EIG = 'full_eig'
    KRYLOV = 'krylov'


class ManyBodyState:
    def __init__(
        self, basis: OccupationBasis, coefficients: np.ndarray
    ) -> None:
        coefficients = np.asarray(coefficients, dtype=complex)
        if coefficients.shape != (basis.dim,):
            raise FockError(
                'State of shape %s on a basis of dimension %d'
                % (coefficients.shape, basis.dim)
            )
        self.basis = basis
        self.coefficients = coefficients

    @classmethod
    def vacuum(cls, basis: OccupationBasis) -> 'ManyBodyState':
        return cls(basis, basis.vacuum())

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def normalized(self) -> 'ManyBodyState':
        norm = self.norm
        if norm == 0:
            raise FockError('Cannot normalize the zero state')
        return ManyBodyState(self.basis, self.coefficients / norm)

    def overlap(self, other: 'ManyBodyState') -> complex:
        return complex(np.vdot(self.coefficients, other.coefficients))

    def expectation(self, op: SparseOperator) -> complex:
        return op.expectation(self.coefficients)

    def number_moments(self) -> Tuple[float, float]:
        """<N> and <N^2>."""
        weights = np.abs(self.coefficients) ** 2
        totals = self.basis.totals
        return (
            float(np.sum(weights * totals)),
            float(np.sum(weights * totals ** 2)),
        )

    def sector_weights(self) -> np.ndarray:
        weights = np.abs(self.coefficients) ** 2
        return np.bincount(self.basis.totals, weights=weights)

    def __repr__(self) -> str:
        return 'ManyBodyState(%r, norm=%.12f)' % (self.basis, self.norm)


@wrap2span(name='fock_evolve', kind=Span.KIND_SOLVER)
def evolve_state(
    H: SparseOperator,
    state: ManyBodyState,
    t: float,
    method: Optional[str] = None,
) -> ManyBodyState:
    """exp(-i t H) state."""
    if not H.hermitian:
        raise FockError('Propagation needs a Hermitian generator')
    if state.basis.dim != H.dim:
        raise FockError(
            'State of dimension %d, generator of dimension %d'
            % (state.basis.dim, H.dim)
        )
    if method is None:
        method = (
            PropagationMethod.FULL_EIG
            if H.dim < FULL_EIG_LIMIT
            else PropagationMethod.KRYLOV
        )
    method = PropagationMethod(method).value
    span = ctx_span_get()
    if span is not None:
        span.tag('fock.method', method)

    psi = state.coefficients
    if method == PropagationMethod.FULL_EIG:
        evals, evecs = H.spectrum()
        out = evecs @ (np.exp(-1j * t * evals) * (evecs.conj().T @ psi))
    else:
        out = krylov_expm(H.matrix, psi, t)

    before = state.norm
    drift = abs(float(np.linalg.norm(out)) - before)
    if drift > NORM_TOLERANCE * max(1.0, before):
        raise FockError(
            'Norm changed by %.3e during propagation to t=%.6g (%s)'
            % (drift, t, method)
        )
    return ManyBodyState(state.basis, out)


def evolve_times(
    H: SparseOperator, state: ManyBodyState, times: Sequence[float]
) -> List[ManyBodyState]:
    """exp(-i t H) state for increasing ``times``, marching between them."""
    out = []
    previous = 0.0
    for t in times:
        if t < previous:
            raise FockError('Times must be increasing, got %s' % list(times))
        if t > previous:
            state = evolve_state(H, state, t - previous)
        out.append(state)
        previous = t
    return out


def product_state(
    phi: np.ndarray, N: int, basis: OccupationBasis
) -> ManyBodyState:
    """phi^{(x)N} with coefficients sqrt(N!/prod n_a!) prod phi_a^{n_a}."""
    if not basis.is_fixed or basis.particles != N:
        raise FockError('Product states need the fixed sector N=%d' % N)
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (basis.modes,):
        raise FockError(
            'Orbital of shape %s on %d modes' % (phi.shape, basis.modes)
        )
    norm = float(np.linalg.norm(phi))
    defect = abs(norm - 1.0)
    if defect > PROJECTION_TOLERANCE:
        raise FockError(
            'Orbital has norm %.12f on the mode span (defect %.3e), '
            'choose an orbital inside the span' % (norm, defect)
        )
    if defect:
        logger.debug('Projection defect of the orbital: %.3e', defect)
    coeffs = monomial_amplitudes(
        basis.occupations, phi / norm, 0.5 * float(gammaln(N + 1))
    )
    return ManyBodyState(basis, coeffs)


def correlator(
    state: ManyBodyState,
    creators: Sequence[int],
    annihilators: Sequence[int],
) -> complex:
    rows, cols, vals = monomial_entries(state.basis, creators, annihilators)
    psi = state.coefficients
    return complex(np.sum(np.conj(psi[rows]) * vals * psi[cols]))


def reduced_density(state: ManyBodyState, k: int = 1) -> np.ndarray:
    """k-particle density matrix, normalised to trace one.

    gamma1[a, b] = <a*_b a_a> / N and
    gamma2[(a, b), (c, d)] = <a*_c a*_d a_b a_a> / (N (N - 1)).
    """
    basis = state.basis
    if not basis.is_fixed:
        raise FockError('Reduced densities need a fixed-N state')
    N = basis.particles
    assert N is not None
    m = basis.modes
    if k == 1:
        if N < 1:
            raise FockError('One-particle density needs N >= 1')
        gamma = np.empty((m, m), dtype=complex)
        for a in range(m):
            for b in range(m):
                gamma[a, b] = correlator(state, [b], [a]) / N
    elif k == 2:
        if N < 2:
            raise FockError('Two-particle density needs N >= 2')
        gamma = np.empty((m * m, m * m), dtype=complex)
        for a in range(m):
            for b in range(m):
                for c in range(m):
                    for d in range(m):
                        gamma[a * m + b, c * m + d] = correlator(
                            state, [c, d], [b, a]
                        ) / (N * (N - 1))
    else:
        raise FockError('Reduced densities are available for k=1, 2')

    trace = np.trace(gamma).real
    if abs(trace - 1.0) > DENSITY_TOLERANCE:
        logger.warning('gamma^(%d) has trace %.12f', k, trace)
    smallest = float(eigvalsh(0.5 * (gamma + gamma.conj().T))[0])
    if smallest < -DENSITY_TOLERANCE:
        logger.warning(
            'gamma^(%d) has eigenvalue %.3e below zero', k, smallest
        )
    return gamma


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Tr |a - b| of two Hermitian matrices."""
    diff = np.asarray(a) - np.asarray(b)
    return float(np.sum(np.abs(eigvalsh(0.5 * (diff + diff.conj().T)))))


class CentredFamily:
    """N^(-1/2) dGamma(O_j - <phi_t, O_j phi_t>) on a fixed-N sector."""

    def __init__(
        self,
        basis: OccupationBasis,
        observables: Sequence[Observable],
        phi_t: np.ndarray,
    ) -> None:
        if not basis.is_fixed:
            raise FockError('Characteristic functions need a fixed-N basis')
        if not observables:
            raise FockError('No observables given')
        N = basis.particles
        assert N is not None
        if N < 1:
            raise FockError('N must be >= 1')
        phi_t = np.asarray(phi_t, dtype=complex)
        self.basis = basis
        self.N = N
        self.scale = 1.0 / np.sqrt(N)
        self.means: List[float] = []
        self.operators: List[SparseOperator] = []
        for o in observables:
            mean = float(np.vdot(phi_t, o.apply(phi_t)).real)
            centred = o.matrix - mean * np.eye(o.dim)
            self.means.append(mean)
            self.operators.append(second_quantize(basis, centred))

    @property
    def k(self) -> int:
        return len(self.operators)

    @property
    def spectral(self) -> bool:
        return self.basis.dim <= FULL_EIG_LIMIT

    def factor(self, j: int, tau: float, psi: np.ndarray) -> np.ndarray:
        """exp(i tau O_j) applied to ``psi``."""
        op = self.operators[j]
        if self.spectral:
            evals, evecs = op.spectrum()
            phases = np.exp(1j * tau * self.scale * evals)
            return evecs @ (phases * (evecs.conj().T @ psi))
        return krylov_expm(op.matrix, psi, -tau * self.scale)

    def charfn(self, psi: np.ndarray, tau: Sequence[float]) -> complex:
        if len(tau) != self.k:
            raise FockError(
                'tau has %d entries for %d observables' % (len(tau), self.k)
            )
        chi = np.asarray(psi, dtype=complex)
        for j in reversed(range(self.k)):
            chi = self.factor(j, float(tau[j]), chi)
        value = complex(np.vdot(psi, chi))
        _check_modulus(abs(value))
        return value

    def _columns(self, j: int, axis: np.ndarray, B: np.ndarray) -> np.ndarray:
        evals, evecs = self.operators[j].spectrum()
        C = evecs.conj().T @ B
        phases = np.exp(1j * self.scale * np.outer(evals, axis))
        out = evecs @ (phases[:, :, None] * C[:, None, :]).reshape(
            len(evals), -1
        )
        return out

    def charfn_grid(self, psi: np.ndarray, axis: np.ndarray) -> np.ndarray:
        """Values on the tensor grid axis^k, shape (len(axis),) * k."""
        axis = np.asarray(axis, dtype=float)
        psi = np.asarray(psi, dtype=complex)
        n = len(axis)
        if not self.spectral:
            values = np.empty((n,) * self.k, dtype=complex)
            for index in np.ndindex(*values.shape):
                values[index] = self.charfn(psi, axis[list(index)])
            return values
        # <psi, e_1 e_2 ... e_k psi> = <e_1^* psi, e_2 ... e_k psi>
        left = self._columns(0, -axis, psi[:, None])
        right = psi[:, None]
        for j in range(self.k - 1, 0, -1):
            right = self._columns(j, axis, right)
        values = (left.conj().T @ right).reshape((n,) * self.k)
        _check_modulus(float(np.max(np.abs(values))))
        return values


def _check_modulus(modulus: float) -> None:
    if modulus > 1.0 + CHARFN_TOLERANCE:
        raise FockError(
            'Characteristic function has modulus %.12f > 1' % modulus
        )


def joint_charfn(
    state: ManyBodyState,
    observables: Sequence[Observable],
    phi_t: np.ndarray,
    tau: Sequence[float],
) -> complex:
    """<psi, exp(i tau_1 O_1) ... exp(i tau_k O_k) psi>, O_j centred."""
    family = CentredFamily(state.basis, observables, phi_t)
    return family.charfn(state.coefficients, tau)
