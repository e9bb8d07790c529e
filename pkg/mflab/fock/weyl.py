import logging
import math

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from ..error import FockError
from .basis import OccupationBasis
from .krylov import krylov_expm
from .operators import SparseOperator, ladder_field

logger = logging.getLogger('mflab')


def required_n_max(f_norm: float) -> int:
    """Poisson(|f|^2) tail beyond |f|^2 + 10 |f| stays below 1e-10."""
    return int(math.ceil(f_norm ** 2 + 10 * f_norm + 20))


def check_truncation(basis: OccupationBasis, f: np.ndarray) -> None:
    if basis.is_fixed:
        raise FockError('Weyl operators need a truncated basis')
    f_norm = float(np.linalg.norm(f))
    need = required_n_max(f_norm)
    assert basis.n_max is not None
    if basis.n_max < need:
        raise FockError(
            'n_max=%d is too small for a displacement of norm %.4g, '
            'need n_max >= %d' % (basis.n_max, f_norm, need)
        )


class WeylOperator:
    """W(f) = exp(a*(f) - a(f)) on a truncated basis.

    Applied to vectors by Krylov propagation of the Hermitian i G with
    G = a*(f) - a(f); W*(f) = W(-f) is the backward step.
    """

    def __init__(self, basis: OccupationBasis, f: np.ndarray) -> None:
        f = np.asarray(f, dtype=complex)
        check_truncation(basis, f)
        self.basis = basis
        self.f = f
        create = ladder_field(basis, f, 'create')
        self.generator = create - create.adjoint()
        self._hermitian = SparseOperator(
            basis, 1j * self.generator.matrix, hermitian=True, label='iG'
        )

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return krylov_expm(self._hermitian.matrix, psi, 1.0)

    def apply_adjoint(self, psi: np.ndarray) -> np.ndarray:
        return krylov_expm(self._hermitian.matrix, psi, -1.0)

    def dense(self) -> np.ndarray:
        return expm(self.generator.dense())

    def __repr__(self) -> str:
        return 'WeylOperator(|f|=%.4g, %r)' % (
            float(np.linalg.norm(self.f)),
            self.basis,
        )


def monomial_amplitudes(
    occupations: np.ndarray, coeffs: np.ndarray, log_prefactor: float = 0.0
) -> np.ndarray:
    """exp(log_prefactor) prod_a c_a^{n_a} / sqrt(n_a!) per occupation row.

    Magnitudes are combined in log space, so large prefactors such as
    sqrt(N!) do not overflow.
    """
    occ = np.asarray(occupations)
    coeffs = np.asarray(coeffs, dtype=complex)
    radius = np.abs(coeffs)
    angle = np.angle(coeffs)
    with np.errstate(divide='ignore', invalid='ignore'):
        log_radius = np.log(radius)
        # 0^0 = 1, 0^n = 0
        powers = np.where(occ > 0, occ * log_radius[None, :], 0.0)
    log_mag = np.sum(powers, axis=1) - 0.5 * np.sum(gammaln(occ + 1), axis=1)
    phase = occ @ angle
    return np.exp(log_prefactor + log_mag + 1j * phase)


def coherent_state(basis: OccupationBasis, f: np.ndarray) -> np.ndarray:
    """W(f) Omega in closed form, cut at the basis edge."""
    f = np.asarray(f, dtype=complex)
    if basis.is_fixed:
        raise FockError('Coherent states need a truncated basis')
    if f.shape != (basis.modes,):
        raise FockError(
            'Field of shape %s on %d modes' % (f.shape, basis.modes)
        )
    norm2 = float(np.vdot(f, f).real)
    return monomial_amplitudes(basis.occupations, f, -norm2 / 2)
