"""Interval probabilities of one rescaled observable against the Gaussian."""
import logging
import math
from typing import TYPE_CHECKING, List, NamedTuple, Tuple

import numpy as np
from scipy.special import erf

from ..covariance import covariance_at
from ..error import StudyError
from ..fock import (
    OccupationBasis,
    build_hamiltonian,
    product_state,
    second_quantize,
    sector_dimension,
)
from ..fock.operators import FULL_EIG_LIMIT
from ..fock.states import ManyBodyState, evolve_times
from ..logger import Span, wrap2span
from ..misc import ctx_span_get
from ..pool import WorkerPool
from ..space import ModeSpace, Observable, make_observable
from .fit import fit_rate
from .model import Model
from .report import Criterion, Report

if TYPE_CHECKING:  # pragma: no cover
    from ..lab import LabConfig

logger = logging.getLogger('mflab')

# eigenvalues this close to an end point count as inside
EDGE_TOLERANCE = 1e-10
DEGENERATE_VARIANCE = 1e-12


def spectral_probability(
    basis: OccupationBasis,
    observable: Observable,
    phi_t: np.ndarray,
    state: ManyBodyState,
    interval: Tuple[float, float],
) -> float:
    """P(O_t in [alpha, beta]) for O_t = dGamma(O - <O>_phi_t) / sqrt(N)."""
    if basis.dim > FULL_EIG_LIMIT:
        raise StudyError(
            'Sector dimension %d exceeds %d, use two modes for this study'
            % (basis.dim, FULL_EIG_LIMIT)
        )
    N = basis.particles
    assert N is not None
    phi_t = np.asarray(phi_t, dtype=complex)
    mean = float(np.vdot(phi_t, observable.apply(phi_t)).real)
    centred = observable.matrix - mean * np.eye(observable.dim)
    evals, evecs = second_quantize(basis, centred).spectrum()
    evals = evals / math.sqrt(N)
    alpha, beta = interval
    inside = (evals >= alpha - EDGE_TOLERANCE) & (
        evals <= beta + EDGE_TOLERANCE
    )
    weights = np.abs(evecs.conj().T @ state.coefficients) ** 2
    return float(np.sum(weights[inside]))


def gaussian_probability(
    variance: float, interval: Tuple[float, float]
) -> float:
    if variance <= DEGENERATE_VARIANCE:
        raise StudyError(
            'Limit variance %.3e is degenerate, the interval probability '
            'has no Gaussian counterpart' % variance
        )
    scale = math.sqrt(2 * variance)
    alpha, beta = interval
    return float(0.5 * (erf(beta / scale) - erf(alpha / scale)))


class BerryEsseenTask(NamedTuple):
    space: ModeSpace
    N: int
    phi0: np.ndarray
    times: List[float]
    phis: List[np.ndarray]
    observable: Observable
    interval: Tuple[float, float]


@wrap2span(name='study_task', kind=Span.KIND_STUDY)
def berry_esseen_task(task: BerryEsseenTask) -> List[float]:
    span = ctx_span_get()
    if span is not None:
        span.tag('study.name', 'berry_esseen')
        span.tag('study.N', str(task.N))
    basis = OccupationBasis.fixed(task.space.dim, task.N)
    H = build_hamiltonian(task.space, task.N, basis)
    initial = product_state(task.phi0, task.N, basis)
    states = evolve_times(H, initial, task.times)
    return [
        spectral_probability(basis, task.observable, phi, state, task.interval)
        for phi, state in zip(task.phis, states)
    ]


async def berry_esseen_command(cfg: 'LabConfig', pool: WorkerPool) -> Report:
    model = Model(cfg)
    space = model.modes
    study = cfg.study
    model.check_times(study.times)
    report = Report('berry-esseen')

    too_big = [
        N for N in study.N if sector_dimension(space.dim, N) > FULL_EIG_LIMIT
    ]
    if too_big:
        raise StudyError(
            'Sectors for N=%s exceed dimension %d, use two modes for this '
            'study' % (too_big, FULL_EIG_LIMIT)
        )
    observable = make_observable(space, study.observable)
    interval = (float(study.interval[0]), float(study.interval[1]))
    gaussian = []
    for t in study.times:
        pair = model.series.pair_at(t)
        cov = covariance_at(pair, model.phi_at(t), [observable])
        variance = float(cov.sigma[0, 0].real)
        gaussian.append(gaussian_probability(variance, interval))

    tasks = [
        BerryEsseenTask(
            space,
            N,
            model.phi0,
            list(study.times),
            [model.phi_at(t) for t in study.times],
            observable,
            interval,
        )
        for N in study.N
    ]
    results = await pool.map(berry_esseen_task, tasks)

    table = report.table(
        'berry_esseen.csv', ['N', 't', 'p_exact', 'p_gauss', 'err_abs']
    )
    errors: List[List[float]] = [[] for _ in study.times]
    for N, probabilities in zip(study.N, results):
        for i, (t, p) in enumerate(zip(study.times, probabilities)):
            err = abs(p - gaussian[i])
            table.add(N, t, p, gaussian[i], err)
            errors[i].append(err)

    report.results['gaussian_probability'] = dict(
        zip([str(t) for t in study.times], gaussian)
    )
    limit = study.thresholds.berry_esseen_slope
    for t, errs in zip(study.times, errors):
        fit = report.fit(
            fit_rate('berry_esseen_t%g' % t, study.N, errs, study.fit_skip)
        )
        if fit.exact:
            continue
        report.check(
            Criterion.at_most('berry_esseen_slope_t%g' % t, fit.slope, limit)
        )
    return report
