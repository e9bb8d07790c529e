"""Coefficients of the centred number state in the coherent frame.

All values are kept in the scaled form w_l = sqrt(l!) xi^(l), which is
the coefficient of the normalised occupation state |l>. The three-term
recursion in w is stable while l < 4N (its characteristic roots have
modulus one there); past that point one root grows and the wanted
solution is the decaying one, which is obtained by backward recursion
and matched to the forward values.
"""
import logging
import math
from typing import List, NamedTuple, Optional

import numpy as np
from pydantic import Field, validator
from scipy.special import gammaln
from scipy.stats import binom

from .config import Section
from .error import XiError

logger = logging.getLogger('mflab')

TAIL_TOLERANCE = 1e-12
START_ELL = 64
MIN_CAP = 4096
BACKWARD_MARGIN = 64
RESCALE = 1e200
EPS = float(np.finfo(float).eps)


class XiConfig(Section):
    N: List[int] = Field(
        [2, 10, 100, 1000, 10000], description="Список значений N"
    )
    ell_check: int = Field(
        60, ge=2, description="Максимальное l для сверки рекурсии и формулы"
    )
    ell_rates: List[int] = Field(
        list(range(2, 9)),
        description="Значения l для поточечных скоростей сходимости "
        "(подгонка по N >= l^2)",
    )
    apriori_bound: float = Field(
        10.0, description="Верхняя граница sum w_l^2/(l+1)"
    )
    ratio_window: float = Field(
        1e-3, description="Допуск |sum w_l^2 / d_N^2 - 1|"
    )
    agreement: float = Field(
        1e-10, description="Допуск относительного расхождения"
    )
    diff5_slope_max: float = Field(
        -0.9, description="Наибольший наклон log diff5 от log N"
    )
    odd_slope: List[float] = Field(
        [-0.6, -0.4], description="Окно наклона для нечётных l"
    )
    even_slope_max: float = Field(
        -0.4, description="Наибольший наклон для чётных l >= 4"
    )
    fit_skip: int = Field(
        1, ge=0, description="Сколько наименьших N исключить из подгонки"
    )

    @validator('N')
    def _increasing(cls, v: List[int]) -> List[int]:
        if any(n < 1 for n in v):
            raise ValueError('N must be positive')
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError('N list must be strictly increasing')
        return v


class XiCoefficients(NamedTuple):
    N: Optional[int]
    w: np.ndarray
    source: str

    @property
    def ell_max(self) -> int:
        return len(self.w) - 1

    def xi(self) -> np.ndarray:
        ells = np.arange(len(self.w))
        return self.w * np.exp(-0.5 * gammaln(ells + 1))


def _forward(N: int, ell_max: int) -> np.ndarray:
    w = np.zeros(ell_max + 1)
    w[0] = 1.0
    scale = 1.0 / math.sqrt(N)
    for ell in range(2, ell_max + 1):
        w[ell] = -((ell - 1) / math.sqrt(ell)) * scale * w[
            ell - 1
        ] - math.sqrt((ell - 1) / ell) * w[ell - 2]
    return w


def _backward(N: int, start: int, top: int) -> np.ndarray:
    """Decaying solution on [start - 1, top], up to normalisation."""
    scale = 1.0 / math.sqrt(N)
    y = np.zeros(top + 2)
    y[top] = 1e-300
    for ell in range(top + 1, start, -1):
        # w_l = -a_l w_{l-1} - b_l w_{l-2}  solved for w_{l-2}
        a = ((ell - 1) / math.sqrt(ell)) * scale
        b = math.sqrt((ell - 1) / ell)
        y[ell - 2] = -(y[ell] + a * y[ell - 1]) / b
        if abs(y[ell - 2]) > RESCALE:
            y /= RESCALE
    return y[: top + 1]


def xi_recursion(N: int, ell_max: int) -> XiCoefficients:
    if N < 1:
        raise XiError('N must be >= 1, got %r' % N)
    if ell_max < 2:
        raise XiError('ell_max must be >= 2, got %r' % ell_max)
    turning = 4 * N
    if ell_max <= turning:
        return XiCoefficients(N, _forward(N, ell_max), 'forward')

    w = np.zeros(ell_max + 1)
    w[: turning + 1] = _forward(N, turning)
    tail = _backward(N, turning, ell_max + BACKWARD_MARGIN)
    anchor = tail[turning]
    if anchor == 0:
        raise XiError('Backward recursion underflowed at l=%d' % turning)
    tail = tail * (w[turning] / anchor)
    w[turning + 1 :] = tail[turning + 1 : ell_max + 1]
    return XiCoefficients(N, w, 'forward+backward')


def xi_closed_form(N: int, ell: int) -> float:
    """xi_N^(l) from the finite sum, evaluated in exact integers.

    The terms alternate and cancel almost completely, so the sum
    S = sum_j (-1)^j C(l, j) N^j N!/(N - l + j)! is formed exactly and
    only xi = S / (l! N^(l/2)) is taken to floating point.
    """
    if ell < 0:
        raise XiError('l must be >= 0, got %r' % ell)
    if ell > N:
        raise XiError('Closed form needs l <= N, got l=%d, N=%d' % (ell, N))
    total = 0
    for j in range(ell + 1):
        falling = math.perm(N, ell - j)
        term = math.comb(ell, j) * N ** j * falling
        total += -term if j % 2 else term
    if total == 0:
        return 0.0
    sign = 1.0 if total > 0 else -1.0
    log_value = (
        math.log(abs(total)) - gammaln(ell + 1) - 0.5 * ell * math.log(N)
    )
    return sign * math.exp(log_value)


def limit_tolerance(ell_max: int) -> float:
    """Relative rounding allowed along a product of ell_max / 2 factors."""
    return max(1e-12, 16 * ell_max * EPS)


def xi_infinity(ell_max: int) -> XiCoefficients:
    if ell_max < 2:
        raise XiError('ell_max must be >= 2, got %r' % ell_max)
    w = np.zeros(ell_max + 1)
    w[0] = 1.0
    for ell in range(2, ell_max + 1):
        w[ell] = -math.sqrt((ell - 1) / ell) * w[ell - 2]

    # w_2m^2 = (2m)! / (4^m m!^2) is the central binomial probability
    m = np.arange(1, ell_max // 2 + 1)
    closed = np.ones(len(m) + 1)
    closed[1:] = np.sqrt(binom.pmf(m, 2 * m, 0.5)) * np.where(m % 2, -1.0, 1.0)
    defect = float(np.max(np.abs(w[0::2] - closed) / np.abs(closed)))
    if defect > limit_tolerance(ell_max) or np.any(w[1::2] != 0):
        raise XiError(
            'Limit recursion and closed form disagree by %.3e' % defect
        )
    return XiCoefficients(None, w, 'limit')


def log_d_squared(N: int) -> float:
    """log d_N^2 = N - N log N + log N!."""
    return float(N - N * math.log(N) + gammaln(N + 1))


class XiNorms(NamedTuple):
    N: int
    ell_max: int
    apriori: float
    total: float
    d_squared: float
    ratio: float
    diff5: float


def _sums(N: int, ell_max: int) -> np.ndarray:
    w = xi_recursion(N, ell_max).w
    w_inf = xi_infinity(ell_max).w
    ells = np.arange(ell_max + 1)
    return np.array(
        [
            np.sum(w ** 2 / (ells + 1)),
            np.sum(w ** 2),
            np.sum((w - w_inf) ** 2 / (ells + 1.0) ** 5),
        ]
    )


def ell_cap(N: int) -> int:
    return max(MIN_CAP, 16 * N)


def xi_norms(N: int, ell_max: Optional[int] = None) -> XiNorms:
    """Weighted norms with adaptive doubling of the cut-off.

    The coefficient mass reaches out to l ~ 4N, so the cut-off is allowed
    to grow to max(4096, 16N).
    """
    cap = ell_cap(N)
    ell = START_ELL if ell_max is None else ell_max
    previous = _sums(N, ell)
    while True:
        if ell >= cap:
            raise XiError(
                'Weighted norms for N=%d did not converge by l=%d'
                % (N, ell)
            )
        ell = min(2 * ell, cap)
        current = _sums(N, ell)
        change = np.abs(current - previous)
        limit = TAIL_TOLERANCE * np.maximum(1.0, np.abs(current))
        if np.all(change <= limit):
            break
        previous = current

    apriori, total, diff5 = current.tolist()
    d_squared = math.exp(log_d_squared(N))
    return XiNorms(
        N=N,
        ell_max=ell,
        apriori=apriori,
        total=total,
        d_squared=d_squared,
        ratio=total / d_squared,
        diff5=diff5,
    )
