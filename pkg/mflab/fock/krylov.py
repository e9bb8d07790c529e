"""exp(-i t H) psi for Hermitian H by Lanczos with adaptive substeps."""
import logging
from typing import Callable, NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.linalg import eigh

from ..error import KrylovError

logger = logging.getLogger('mflab')

KRYLOV_TOLERANCE = 1e-10
KRYLOV_DIMENSION = 40
MAX_HALVINGS = 40

MatVec = Callable[[np.ndarray], np.ndarray]


class KrylovStats(NamedTuple):
    substeps: int
    halvings: int
    max_error: float


def _matvec(H: Union[MatVec, sparse.spmatrix, np.ndarray]) -> MatVec:
    if callable(H):
        return H
    return lambda v: H @ v


def lanczos_exp(
    matvec: MatVec,
    psi: np.ndarray,
    t: float,
    m_max: int = KRYLOV_DIMENSION,
) -> Tuple[np.ndarray, float]:
    """One Krylov approximation of exp(-i t H) psi and its error estimate.

    The estimate is beta_m |e_m^T exp(-i t T_m) e_1| times |psi|.
    """
    beta0 = float(np.linalg.norm(psi))
    if beta0 == 0.0:
        return np.zeros_like(psi, dtype=complex), 0.0
    n = psi.shape[0]
    m_max = min(m_max, n)
    V = np.zeros((m_max, n), dtype=complex)
    V[0] = psi / beta0
    alpha = []
    beta = []
    for j in range(m_max):
        w = matvec(V[j])
        a = float(np.vdot(V[j], w).real)
        w = w - a * V[j]
        if j > 0:
            w = w - beta[j - 1] * V[j - 1]
        # full reorthogonalisation
        w = w - V[: j + 1].T @ (V[: j + 1].conj() @ w)
        alpha.append(a)
        b = float(np.linalg.norm(w))

        T = np.diag(alpha) + np.diag(beta, 1) + np.diag(beta, -1)
        evals, evecs = eigh(T)
        c = evecs @ (np.exp(-1j * t * evals) * evecs[0])
        error = beta0 * b * abs(c[-1])
        scale = max(1.0, max(abs(x) for x in alpha))
        invariant = b <= 1e-14 * scale
        if invariant or error <= KRYLOV_TOLERANCE or j == m_max - 1:
            if invariant:
                error = 0.0
            return beta0 * (V[: j + 1].T @ c), error
        beta.append(b)
        V[j + 1] = w / b
    raise AssertionError('unreachable')  # pragma: no cover


def krylov_expm(
    H: Union[MatVec, sparse.spmatrix, np.ndarray],
    psi: np.ndarray,
    t: float,
    tol: float = KRYLOV_TOLERANCE,
    m_max: int = KRYLOV_DIMENSION,
    stats: Optional[list] = None,
) -> np.ndarray:
    """exp(-i t H) psi; the step is halved until each substep meets ``tol``."""
    matvec = _matvec(H)
    psi = np.asarray(psi, dtype=complex)
    if t == 0:
        return psi.copy()
    sign = 1.0 if t > 0 else -1.0
    remaining = abs(t)
    step = remaining
    halvings = 0
    substeps = 0
    worst = 0.0
    out = psi
    while remaining > 1e-15 * abs(t):
        step = min(step, remaining)
        candidate, error = lanczos_exp(matvec, out, sign * step, m_max)
        if error > tol:
            halvings += 1
            if halvings > MAX_HALVINGS:
                raise KrylovError(
                    'Krylov propagation did not converge: error %.3e > %.1e '
                    'with substep %.3e at t=%.6g of %.6g'
                    % (error, tol, step, sign * (abs(t) - remaining), t)
                )
            step /= 2
            continue
        out = candidate
        remaining -= step
        substeps += 1
        worst = max(worst, error)
    if stats is not None:
        stats.append(KrylovStats(substeps, halvings, worst))
    return out
