import logging
from functools import reduce
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

import numpy as np
from scipy.linalg import eigh

from .bogoliubov import BogoliubovPair
from .error import CovarianceError
from .space import Observable, SingleParticleSpace

logger = logging.getLogger('mflab')

PHASE_TOLERANCE = 1e-9
PSD_ABORT = -1e-8
PSD_WARN = -1e-10
REALITY_TOLERANCE = 1e-10
POSITIVE_TOLERANCE = 1e-10
TAIL_TOLERANCE = 1e-8
MAX_QUADRATURE_DIM = 6
MAX_QUADRATURE_POINTS = 20_000_000
TIME_TOLERANCE = 1e-12


class FluctuationVector(NamedTuple):
    g: np.ndarray
    label: str
    t: float
    overlap: float


def fluctuation_vector(
    pair: BogoliubovPair, phi_t: np.ndarray, observable: Observable
) -> FluctuationVector:
    space = pair.space
    mismatch = space.norm(np.asarray(phi_t) - pair.phi_t)
    if mismatch > TIME_TOLERANCE:
        raise CovarianceError(
            'Hartree state does not belong to the Bogoliubov pair at t=%g '
            '(difference %.3e)' % (pair.t, mismatch)
        )
    g = pair.apply(observable.apply(phi_t))
    overlap = space.inner(pair.phi0, g)
    if abs(overlap.imag) > PHASE_TOLERANCE:
        logger.warning(
            '<phi_0, g> of %s has imaginary part %.3e at t=%g',
            observable.label,
            overlap.imag,
            pair.t,
        )
    return FluctuationVector(g, observable.label, pair.t, overlap.real)


class CovarianceMatrix:
    def __init__(
        self,
        sigma: np.ndarray,
        t: float = 0.0,
        labels: Optional[Sequence[str]] = None,
        commuting: Optional[bool] = None,
    ) -> None:
        self.sigma = np.asarray(sigma, dtype=complex)
        self.t = t
        self.labels = list(labels or [])
        self.commuting = commuting

    @property
    def k(self) -> int:
        return self.sigma.shape[0]

    @property
    def P(self) -> np.ndarray:
        return self.sigma.real

    @property
    def R(self) -> np.ndarray:
        return self.sigma.imag

    @property
    def eigs_P(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.P)

    def imag_max(self) -> float:
        return float(np.max(np.abs(self.R)))

    def export(self) -> Dict[str, Any]:
        return {
            't': self.t,
            'k': self.k,
            'labels': self.labels,
            're': self.P.tolist(),
            'im': self.R.tolist(),
            'eigs_reP': self.eigs_P.tolist(),
        }


def covariance_matrix(
    space: SingleParticleSpace,
    gs: Sequence[FluctuationVector],
    phi0: np.ndarray,
    commuting: Optional[bool] = None,
) -> CovarianceMatrix:
    if not gs:
        raise CovarianceError('No fluctuation vectors given')
    t = gs[0].t
    if any(abs(g.t - t) > TIME_TOLERANCE for g in gs):
        raise CovarianceError('Fluctuation vectors at different times')
    k = len(gs)
    sigma = np.empty((k, k), dtype=complex)
    for i in range(k):
        for j in range(i, k):
            sigma[i, j] = space.inner(gs[i].g, gs[j].g) - space.inner(
                gs[i].g, phi0
            ) * space.inner(phi0, gs[j].g)
            # symmetric, not Hermitian
            sigma[j, i] = sigma[i, j]

    cov = CovarianceMatrix(sigma, t, [g.label for g in gs], commuting)
    smallest = float(cov.eigs_P[0])
    if smallest < PSD_ABORT:
        raise CovarianceError(
            'Re Sigma has eigenvalue %.3e < %.0e at t=%g'
            % (smallest, PSD_ABORT, t)
        )
    if smallest < PSD_WARN:
        logger.warning(
            'Re Sigma has eigenvalue %.3e at t=%g', smallest, t
        )
    if commuting and cov.imag_max() > REALITY_TOLERANCE:
        logger.warning(
            'Commuting family has |Im Sigma| = %.3e at t=%g',
            cov.imag_max(),
            t,
        )
    return cov


def commuting_family(observables: Sequence[Observable]) -> bool:
    return all(
        a.commutes(b)
        for i, a in enumerate(observables)
        for b in observables[i + 1 :]
    )


def covariance_at(
    pair: BogoliubovPair,
    phi_t: np.ndarray,
    observables: Sequence[Observable],
    commuting: Optional[bool] = None,
) -> CovarianceMatrix:
    if commuting is None:
        commuting = commuting_family(observables)
    gs = [fluctuation_vector(pair, phi_t, o) for o in observables]
    return covariance_matrix(pair.space, gs, pair.phi0, commuting)


def gaussian_charfn(sigma: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """exp(-1/2 tau^T Sigma tau); ``tau`` may carry leading batch axes."""
    sigma = np.asarray(sigma)
    tau = np.asarray(tau, dtype=float)
    quad = np.einsum('...i,ij,...j->...', tau, sigma, tau)
    return np.exp(-0.5 * quad)


class _Factorization(NamedTuple):
    sqrt_p_inv: np.ndarray
    kappa: np.ndarray
    vectors: np.ndarray
    det_p: float


def _factorize(sigma: np.ndarray) -> _Factorization:
    P = sigma.real
    R = sigma.imag
    p_eigs, p_vecs = eigh(P)
    if p_eigs[0] < POSITIVE_TOLERANCE:
        raise CovarianceError(
            'Re Sigma is not strictly positive (smallest eigenvalue %.3e); '
            'use the characteristic function instead' % p_eigs[0]
        )
    sqrt_p_inv = (p_vecs / np.sqrt(p_eigs)) @ p_vecs.T
    K = sqrt_p_inv @ R @ sqrt_p_inv
    kappa, vectors = eigh(0.5 * (K + K.T))
    return _Factorization(sqrt_p_inv, kappa, vectors, float(np.prod(p_eigs)))


def gaussian_density(sigma: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Complex Gaussian density with Sigma = P^1/2 (1 + iK) P^1/2.

    sqrt(det(1 + iK)) uses the principal logarithm of every 1 + i kappa,
    which is continuous because their real parts all equal one.
    """
    sigma = np.asarray(sigma, dtype=complex)
    fac = _factorize(sigma)
    k = sigma.shape[0]
    inv_mid = (fac.vectors / (1 + 1j * fac.kappa)) @ fac.vectors.T
    sigma_inv = fac.sqrt_p_inv @ inv_mid @ fac.sqrt_p_inv
    sqrt_det = np.sqrt(fac.det_p) * np.exp(
        0.5 * np.sum(np.log(1 + 1j * fac.kappa))
    )
    x = np.asarray(x, dtype=float)
    quad = np.einsum('...i,ij,...j->...', x, sigma_inv, x)
    return np.exp(-0.5 * quad) / (np.sqrt((2 * np.pi) ** k) * sqrt_det)


class GaussianExpectation(NamedTuple):
    value: complex
    error: float
    warnings: List[str]


def _trapezoid_weights(n: int, step: float) -> np.ndarray:
    w = np.full(n, step)
    w[0] = w[-1] = step / 2
    return w


def _tensor_quadrature(
    sigma: np.ndarray, tau: np.ndarray, fhat: Sequence[np.ndarray]
) -> complex:
    k = len(fhat)
    step = tau[1] - tau[0]
    weights = _trapezoid_weights(len(tau), step)
    factors = [np.asarray(f) * weights for f in fhat]
    if k == 1:
        values = gaussian_charfn(sigma, tau[:, None])
        return complex(np.sum(factors[0] * values))
    total = 0.0 + 0.0j
    # outer loop over the first axis keeps memory at n^(k-1)
    rest = np.stack(np.meshgrid(*([tau] * (k - 1)), indexing='ij'), -1)
    rest_weight = reduce(np.multiply.outer, factors[1:])
    for i, t0 in enumerate(tau):
        if factors[0][i] == 0:
            continue
        point = np.concatenate(
            [np.full(rest.shape[:-1] + (1,), t0), rest], axis=-1
        )
        total += factors[0][i] * np.sum(
            rest_weight * gaussian_charfn(sigma, point)
        )
    return complex(total)


def gaussian_expectation(
    sigma: np.ndarray, tau: np.ndarray, fhat: Sequence[np.ndarray]
) -> GaussianExpectation:
    """Integral of prod_j fhat_j(tau_j) exp(-1/2 tau Sigma tau) d tau.

    ``fhat`` are samples on the uniform grid ``tau``, normalised so that
    f(x) = integral of fhat(tau) exp(i tau x). The error estimate compares
    against the same rule on every second node.
    """
    sigma = np.asarray(sigma, dtype=complex)
    tau = np.asarray(tau, dtype=float)
    k = sigma.shape[0]
    if len(fhat) != k:
        raise CovarianceError(
            '%d transforms given for a %dx%d covariance' % (len(fhat), k, k)
        )
    if k > MAX_QUADRATURE_DIM:
        raise CovarianceError(
            'Quadrature is limited to k <= %d, got %d'
            % (MAX_QUADRATURE_DIM, k)
        )
    if len(tau) < 5 or np.any(np.abs(np.diff(tau, 2)) > 1e-9):
        raise CovarianceError('tau grid must be uniform with >= 5 nodes')
    if len(tau) ** k > MAX_QUADRATURE_POINTS:
        raise CovarianceError(
            'Quadrature grid of %d^%d nodes is too large' % (len(tau), k)
        )

    warnings = []
    for j, f in enumerate(fhat):
        f = np.asarray(f)
        peak = float(np.max(np.abs(f))) or 1.0
        tail = max(abs(f[0]), abs(f[-1])) / peak
        if tail > TAIL_TOLERANCE:
            warnings.append(
                'fhat[%d] does not decay at the grid ends (%.1e of peak)'
                % (j, tail)
            )
    for message in warnings:
        logger.warning(message)

    value = _tensor_quadrature(sigma, tau, fhat)
    odd = len(tau) % 2 == 1
    sub = slice(0, None, 2) if odd else slice(0, -1, 2)
    coarse = _tensor_quadrature(
        sigma, tau[sub], [np.asarray(f)[sub] for f in fhat]
    )
    return GaussianExpectation(value, abs(value - coarse), warnings)


def tau_grid(tau_max: float, points: int, k: int) -> np.ndarray:
    """Tensor grid of shape (points,)*k + (k,)."""
    axis = np.linspace(-tau_max, tau_max, points)
    return np.stack(np.meshgrid(*([axis] * k), indexing='ij'), -1)
