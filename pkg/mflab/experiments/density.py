"""Reduced density matrices of the N-body state against the Hartree orbital."""
import logging
from typing import TYPE_CHECKING, List, NamedTuple

import numpy as np

from ..fock import (
    OccupationBasis,
    build_hamiltonian,
    product_state,
    reduced_density,
    second_quantize,
    trace_distance,
)
from ..fock.states import ManyBodyState, evolve_times
from ..logger import Span, wrap2span
from ..misc import ctx_span_get
from ..pool import WorkerPool
from ..space import ModeSpace, Observable, make_observable
from .fit import fit_rate, spread_ratio
from .model import Model
from .report import Criterion, Report

if TYPE_CHECKING:  # pragma: no cover
    from ..lab import LabConfig

logger = logging.getLogger('mflab')


def number_variance(
    basis: OccupationBasis, observable: Observable, state: ManyBodyState
) -> float:
    """N Var(dGamma(O) / N) = Var(dGamma(O)) / N."""
    N = basis.particles
    assert N is not None
    op = second_quantize(basis, observable.matrix)
    psi = state.coefficients
    applied = op.apply(psi)
    mean = float(np.vdot(psi, applied).real)
    second = float(np.vdot(applied, applied).real)
    return max(second - mean ** 2, 0.0) / N


class DensityTask(NamedTuple):
    space: ModeSpace
    N: int
    phi0: np.ndarray
    times: List[float]
    phis: List[np.ndarray]
    observable: Observable


class DensityPoint(NamedTuple):
    N: int
    t: float
    trace1: float
    trace2: float
    variance: float


@wrap2span(name='study_task', kind=Span.KIND_STUDY)
def density_task(task: DensityTask) -> List[DensityPoint]:
    span = ctx_span_get()
    if span is not None:
        span.tag('study.name', 'density')
        span.tag('study.N', str(task.N))
    basis = OccupationBasis.fixed(task.space.dim, task.N)
    H = build_hamiltonian(task.space, task.N, basis)
    initial = product_state(task.phi0, task.N, basis)
    states = evolve_times(H, initial, task.times)
    points = []
    for t, phi, state in zip(task.times, task.phis, states):
        projector = np.outer(phi, phi.conj())
        trace1 = trace_distance(reduced_density(state, 1), projector)
        trace2 = float('nan')
        if task.N >= 2:
            pair = np.kron(phi, phi)
            trace2 = trace_distance(
                reduced_density(state, 2), np.outer(pair, pair.conj())
            )
        variance = number_variance(basis, task.observable, state)
        points.append(DensityPoint(task.N, t, trace1, trace2, variance))
    return points


async def density_command(cfg: 'LabConfig', pool: WorkerPool) -> Report:
    model = Model(cfg)
    space = model.modes
    study = cfg.study
    limits = study.thresholds
    model.check_times(study.times)
    report = Report('density-rate')
    observable = make_observable(space, study.observable)
    phis = [model.phi_at(t) for t in study.times]

    tasks = [
        DensityTask(
            space, N, model.phi0, list(study.times), phis, observable
        )
        for N in study.N
    ]
    results = await pool.map(density_task, tasks)

    table = report.table(
        'density.csv', ['N', 't', 'trace_gamma1', 'trace_gamma2', 'n_var']
    )
    by_time: List[List[DensityPoint]] = [[] for _ in study.times]
    for points in results:
        for i, p in enumerate(points):
            table.add(p.N, p.t, p.trace1, p.trace2, p.variance)
            by_time[i].append(p)

    for t, points in zip(study.times, by_time):
        fit = report.fit(
            fit_rate(
                'trace_gamma1_t%g' % t,
                [p.N for p in points],
                [p.trace1 for p in points],
                study.fit_skip,
            )
        )
        if not fit.exact:
            report.check(
                Criterion.within(
                    'density_slope_t%g' % t, fit.slope, limits.density_slope
                )
            )
        ratio = spread_ratio([p.variance for p in points])
        report.results['lln_ratio_t%g' % t] = ratio
        report.check(
            Criterion.at_most('lln_ratio_t%g' % t, ratio, limits.lln_ratio)
        )
    return report
