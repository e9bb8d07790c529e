"""Fluctuation dynamics around the coherent mean-field flow.

U_N(t; 0) Omega = W*(sqrt(N) phi_t) exp(-i t H_N) W(sqrt(N) phi_0) Omega
is evaluated on a truncated Fock space. Its limit U_inf(t; 0) is
generated by the quadratic

    L(t) = sum_ab D_ab a*_a a_b
           + 1/2 sum_ab (k_ab a*_a a*_b + conj(k_ab) a_b a_a)

with D and k = sum_cd W_abcd phi_c phi_d taken from the Hartree state.
"""
import logging
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
from scipy import sparse

from ..bogoliubov import assemble_generator
from ..error import FockError
from ..hartree import HartreeTrajectory, time_steps
from ..logger import Span, wrap2span
from ..misc import ctx_span_get
from ..space import ModeSpace, require_modes
from .basis import OccupationBasis
from .krylov import krylov_expm
from .operators import SparseOperator, assemble, build_hamiltonian
from .states import ManyBodyState, evolve_state
from .weyl import WeylOperator, check_truncation, coherent_state

logger = logging.getLogger('mflab')

NORM_ABORT = 1e-5
NORM_WARN = 1e-7
QUADRATIC_NORM_WARN = 1e-6

# Gauss nodes and weights of the fourth order commutator-free scheme
_CF4_NODES = (0.5 - np.sqrt(3) / 6, 0.5 + np.sqrt(3) / 6)
_CF4_A1 = 0.25 - np.sqrt(3) / 6
_CF4_A2 = 0.25 + np.sqrt(3) / 6


class QuadraticMethod(str, Enum):
    CF4 = 'cf4'
    MIDPOINT = 'midpoint'


def _check_norm(norm: float, what: str, t: float) -> None:
    loss = abs(1.0 - norm)
    if loss > NORM_ABORT:
        raise FockError(
            '%s lost %.3e of its norm at t=%.6g, raise n_max'
            % (what, loss, t)
        )
    if loss > NORM_WARN:
        logger.warning('%s lost %.3e of its norm at t=%.6g', what, loss, t)


def _propagate(L: sparse.spmatrix, psi: np.ndarray, dt: float) -> np.ndarray:
    if psi.ndim == 1:
        return krylov_expm(L, psi, dt)
    return np.column_stack(
        [krylov_expm(L, psi[:, j], dt) for j in range(psi.shape[1])]
    )


def _check_basis(space: ModeSpace, basis: OccupationBasis) -> None:
    if basis.is_fixed:
        raise FockError('Fluctuation dynamics need a truncated basis')
    if basis.modes != space.dim:
        raise FockError(
            'Space has %d modes, the basis %d' % (space.dim, basis.modes)
        )


def fluctuation_state(
    trajectory: HartreeTrajectory,
    N: int,
    t: float,
    basis: OccupationBasis,
    hamiltonian: Optional[SparseOperator] = None,
) -> ManyBodyState:
    space = require_modes(trajectory.space)
    _check_basis(space, basis)
    scale = np.sqrt(N)
    phi0 = trajectory.phi0
    phi_t = trajectory.at(t)
    check_truncation(basis, scale * phi0)
    check_truncation(basis, scale * phi_t)

    coherent = ManyBodyState(basis, coherent_state(basis, scale * phi0))
    _check_norm(coherent.norm, 'Coherent state', 0.0)
    if hamiltonian is None:
        hamiltonian = build_hamiltonian(space, N, basis)
    evolved = evolve_state(hamiltonian, coherent, t)
    weyl = WeylOperator(basis, scale * phi_t)
    state = ManyBodyState(basis, weyl.apply_adjoint(evolved.coefficients))
    _check_norm(state.norm, 'U_N(t) Omega', t)
    return state


class QuadraticDynamics:
    """Time-dependent quadratic generator on a truncated basis."""

    def __init__(self, space: ModeSpace, basis: OccupationBasis) -> None:
        _check_basis(space, basis)
        m = space.dim
        self.space = space
        self.basis = basis
        self._hopping = [
            [assemble(basis, [(1.0, [a], [b])]).matrix for b in range(m)]
            for a in range(m)
        ]
        self._pairs = [
            [assemble(basis, [(1.0, [a, b], [])]).matrix for b in range(m)]
            for a in range(m)
        ]

    def generator(self, phi: np.ndarray, t: float = 0.0) -> SparseOperator:
        space = self.space
        m = space.dim
        D = assemble_generator(space, phi, t).D
        kernel = space.pair_kernel(phi)
        dim = self.basis.dim
        total = sparse.csr_matrix((dim, dim), dtype=complex)
        for a in range(m):
            for b in range(m):
                if D[a, b] != 0:
                    total = total + D[a, b] * self._hopping[a][b]
                if kernel[a, b] != 0:
                    pair = 0.5 * kernel[a, b] * self._pairs[a][b]
                    total = total + pair + pair.conj().T
        return SparseOperator(self.basis, total, hermitian=True, label='L')

    def step(
        self,
        trajectory: HartreeTrajectory,
        psi: np.ndarray,
        t: float,
        dt: float,
        method: str,
    ) -> np.ndarray:
        """One step for a vector or for the columns of a matrix."""
        if method == QuadraticMethod.MIDPOINT:
            L = self.generator(trajectory.at(t + dt / 2), t + dt / 2)
            return _propagate(L.matrix, psi, dt)
        L1 = self.generator(
            trajectory.at(t + _CF4_NODES[0] * dt), t + _CF4_NODES[0] * dt
        ).matrix
        L2 = self.generator(
            trajectory.at(t + _CF4_NODES[1] * dt), t + _CF4_NODES[1] * dt
        ).matrix
        psi = _propagate(_CF4_A2 * L1 + _CF4_A1 * L2, psi, dt)
        return _propagate(_CF4_A1 * L1 + _CF4_A2 * L2, psi, dt)

    @wrap2span(name='fock_evolve', kind=Span.KIND_SOLVER)
    def evolve_columns(
        self,
        trajectory: HartreeTrajectory,
        times: Sequence[float],
        columns: np.ndarray,
        dt: Optional[float] = None,
        method: str = QuadraticMethod.CF4.value,
    ) -> List[np.ndarray]:
        """U_inf(t; 0) applied to every column, for increasing ``times``.

        The generators of a step are built once and shared by all columns.
        """
        method = QuadraticMethod(method).value
        span = ctx_span_get()
        if span is not None:
            span.tag('fock.method', 'quadratic_' + method)
        dt = trajectory.dt if dt is None else dt
        c = np.array(columns, dtype=complex)
        if c.ndim != 2 or c.shape[0] != self.basis.dim:
            raise FockError(
                'Columns of shape %s on a basis of dimension %d'
                % (c.shape, self.basis.dim)
            )
        before = np.linalg.norm(c, axis=0)
        out = []
        previous = 0.0
        for t in times:
            if t < previous:
                raise FockError(
                    'Times must be increasing, got %s' % list(times)
                )
            if t > previous:
                steps = time_steps(t - previous, dt)
                for n in range(steps):
                    start = previous + n * dt
                    c = self.step(trajectory, c, start, dt, method)
                drift = np.max(np.abs(np.linalg.norm(c, axis=0) - before))
                self._check_drift(float(drift), t)
            out.append(c.copy())
            previous = t
        return out

    def evolve_times(
        self,
        trajectory: HartreeTrajectory,
        times: Sequence[float],
        psi: Optional[ManyBodyState] = None,
        dt: Optional[float] = None,
        method: str = QuadraticMethod.CF4.value,
    ) -> List[ManyBodyState]:
        """U_inf(t; 0) psi for increasing ``times``, the vacuum by default."""
        if psi is None:
            psi = ManyBodyState.vacuum(self.basis)
        columns = self.evolve_columns(
            trajectory, times, psi.coefficients[:, None], dt, method
        )
        return [ManyBodyState(self.basis, c[:, 0]) for c in columns]

    def evolve(
        self,
        trajectory: HartreeTrajectory,
        t: float,
        psi: Optional[ManyBodyState] = None,
        dt: Optional[float] = None,
        method: str = QuadraticMethod.CF4.value,
    ) -> ManyBodyState:
        return self.evolve_times(trajectory, [t], psi, dt, method)[0]

    @staticmethod
    def _check_drift(drift: float, t: float) -> None:
        drift = abs(drift)
        if drift > NORM_ABORT:
            raise FockError(
                'Quadratic propagation changed the norm by %.3e at t=%.6g, '
                'raise n_max' % (drift, t)
            )
        if drift > QUADRATIC_NORM_WARN:
            logger.warning(
                'Quadratic propagation changed the norm by %.3e at t=%.6g',
                drift,
                t,
            )


def evolve_quadratic(
    trajectory: HartreeTrajectory,
    basis: OccupationBasis,
    t: float,
    psi: Optional[ManyBodyState] = None,
    dt: Optional[float] = None,
    method: str = QuadraticMethod.CF4.value,
) -> ManyBodyState:
    space = require_modes(trajectory.space)
    return QuadraticDynamics(space, basis).evolve(
        trajectory, t, psi, dt, method
    )


def embed(state: ManyBodyState, target: OccupationBasis) -> np.ndarray:
    """Coefficients of ``state`` on ``target``, zero where it has none."""
    if target is state.basis:
        return state.coefficients
    if target.modes != state.basis.modes:
        raise FockError(
            'Cannot embed %r into %r' % (state.basis, target)
        )
    idx = state.basis.indices(target.occupations)
    out = np.zeros(target.dim, dtype=complex)
    found = idx >= 0
    out[found] = state.coefficients[idx[found]]
    return out


def phase_aligned_distance(a: ManyBodyState, b: ManyBodyState) -> float:
    """min over theta of |a - exp(i theta) b|.

    The states may live on different truncations; components outside
    the common occupations count fully.
    """
    na = a.norm
    nb = b.norm
    overlap = abs(complex(np.vdot(embed(a, b.basis), b.coefficients)))
    return float(np.sqrt(max(na ** 2 + nb ** 2 - 2 * overlap, 0.0)))


def number_growth(
    trajectory: HartreeTrajectory,
    N: int,
    times: List[float],
    basis: OccupationBasis,
) -> List[ManyBodyState]:
    """U_N(t; 0) Omega for every t in ``times`` with a shared H_N."""
    space = require_modes(trajectory.space)
    H = build_hamiltonian(space, N, basis)
    return [fluctuation_state(trajectory, N, t, basis, H) for t in times]
