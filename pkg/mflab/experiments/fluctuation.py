"""Fluctuation dynamics: number growth and distance to the quadratic limit."""
import logging
import math
from typing import TYPE_CHECKING, List, NamedTuple

from ..fock import (
    OccupationBasis,
    QuadraticDynamics,
    number_growth,
    phase_aligned_distance,
    required_n_max,
)
from ..fock.states import ManyBodyState
from ..hartree import HartreeTrajectory
from ..logger import Span, wrap2span
from ..misc import ctx_span_get
from ..pool import WorkerPool
from .fit import fit_rate, spread_ratio
from .model import Model
from .report import Criterion, Report

if TYPE_CHECKING:  # pragma: no cover
    from ..lab import LabConfig

logger = logging.getLogger('mflab')

# distances below this mean the two dynamics agree
AGREEMENT = 1e-8


class FluctuationTask(NamedTuple):
    trajectory: HartreeTrajectory
    N: int
    times: List[float]
    limits: List[ManyBodyState]


class FluctuationPoint(NamedTuple):
    N: int
    t: float
    n_max: int
    number: float
    number_sq: float
    distance: float


@wrap2span(name='study_task', kind=Span.KIND_STUDY)
def fluctuation_task(task: FluctuationTask) -> List[FluctuationPoint]:
    span = ctx_span_get()
    if span is not None:
        span.tag('study.name', 'fluctuation')
        span.tag('study.N', str(task.N))
    n_max = required_n_max(math.sqrt(task.N))
    basis = OccupationBasis.truncated(task.trajectory.space.dim, n_max)
    logger.debug('N=%d on %r', task.N, basis)
    states = number_growth(task.trajectory, task.N, task.times, basis)
    points = []
    for t, state, limit in zip(task.times, states, task.limits):
        number, number_sq = state.number_moments()
        distance = phase_aligned_distance(state, limit)
        points.append(
            FluctuationPoint(task.N, t, n_max, number, number_sq, distance)
        )
    return points


async def fluctuation_command(cfg: 'LabConfig', pool: WorkerPool) -> Report:
    model = Model(cfg)
    space = model.modes
    study = cfg.study
    limits = study.thresholds
    model.check_times(study.times)
    report = Report('fluctuation')
    trajectory = model.trajectory

    basis = OccupationBasis.truncated(space.dim, max(study.n_max))
    quadratic = QuadraticDynamics(space, basis).evolve_times(
        trajectory, study.times, dt=study.quadratic_dt
    )
    report.results['quadratic'] = {
        'n_max': basis.n_max,
        'dt': study.quadratic_dt or trajectory.dt,
        'number': [s.number_moments()[0] for s in quadratic],
    }

    tasks = [
        FluctuationTask(trajectory, N, list(study.times), quadratic)
        for N in study.N
    ]
    results = await pool.map(fluctuation_task, tasks)

    table = report.table(
        'fluctuation.csv',
        [
            'N',
            't',
            'n_max',
            'number',
            'number_sq',
            'phase_aligned_distance',
        ],
    )
    by_time: List[List[FluctuationPoint]] = [[] for _ in study.times]
    for points in results:
        for i, p in enumerate(points):
            table.add(p.N, p.t, p.n_max, p.number, p.number_sq, p.distance)
            by_time[i].append(p)

    for t, points in zip(study.times, by_time):
        growth = spread_ratio([p.number for p in points])
        report.results['number_ratio_t%g' % t] = growth
        report.check(
            Criterion.at_most(
                'number_ratio_t%g' % t, growth, limits.number_growth
            )
        )
        worst = max(p.distance for p in points)
        if t == 0 or worst <= AGREEMENT:
            report.check(
                Criterion.at_most('distance_t%g' % t, worst, AGREEMENT)
            )
            continue
        fit = report.fit(
            fit_rate(
                'fluctuation_distance_t%g' % t,
                [p.N for p in points],
                [p.distance for p in points],
                study.fit_skip,
            )
        )
        if fit.exact:
            continue
        report.check(
            Criterion.at_most(
                'fluctuation_slope_t%g' % t,
                fit.slope,
                limits.fluctuation_slope,
            )
        )
    return report
