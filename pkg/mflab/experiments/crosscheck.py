"""Action of the quadratic dynamics on ladder operators against Theta.

On a truncated Fock space the matrix elements of U_inf* a(e_a) U_inf
between low-lying occupation states are compared with those of
a(U e_a) + a*(J V e_a), (U, V) being the blocks of the Bogoliubov map.
The truncation error shows up as a deviation that falls when n_max
grows.
"""
import logging
from typing import TYPE_CHECKING, List, NamedTuple

import numpy as np
from scipy import sparse

from ..fock import (
    LadderKind,
    OccupationBasis,
    QuadraticDynamics,
    ladder_field,
)
from ..hartree import HartreeTrajectory
from ..logger import Span, wrap2span
from ..misc import ctx_span_get
from ..pool import WorkerPool
from ..space import ModeSpace
from .model import Model
from .report import Criterion, Report

if TYPE_CHECKING:  # pragma: no cover
    from ..lab import LabConfig

logger = logging.getLogger('mflab')

# deviations below this count as exact agreement
EXACT_DEVIATION = 1e-10


def sample_indices(basis: OccupationBasis, particles: int) -> np.ndarray:
    """Occupation states with at most ``particles`` bosons."""
    return np.flatnonzero(basis.totals <= particles)


def predicted_action(
    space: ModeSpace,
    basis: OccupationBasis,
    U: np.ndarray,
    V: np.ndarray,
    a: int,
) -> sparse.spmatrix:
    """Sparse matrix of a(U e_a) + a*(J V e_a)."""
    e = space.basis_vector(a)
    annihilate = ladder_field(basis, U @ e, LadderKind.ANNIHILATE.value)
    create = ladder_field(
        basis, space.conjugate(V @ e), LadderKind.CREATE.value
    )
    return (annihilate + create).matrix


class CrosscheckTask(NamedTuple):
    space: ModeSpace
    trajectory: HartreeTrajectory
    n_max: int
    particles: int
    times: List[float]
    blocks: List[tuple]
    dt: float


@wrap2span(name='study_task', kind=Span.KIND_STUDY)
def crosscheck_task(task: CrosscheckTask) -> List[float]:
    """Worst deviation over modes and sample pairs, one per time."""
    span = ctx_span_get()
    if span is not None:
        span.tag('study.name', 'crosscheck')
        span.tag('study.n_max', str(task.n_max))
    space = task.space
    basis = OccupationBasis.truncated(space.dim, task.n_max)
    dynamics = QuadraticDynamics(space, basis)
    samples = sample_indices(basis, task.particles)
    start = np.zeros((basis.dim, len(samples)), dtype=complex)
    start[samples, np.arange(len(samples))] = 1.0
    evolved = dynamics.evolve_columns(
        task.trajectory, task.times, start, task.dt
    )

    deviations = []
    for columns, (U, V) in zip(evolved, task.blocks):
        worst = 0.0
        for a in range(space.dim):
            annihilator = ladder_field(
                basis, space.basis_vector(a), LadderKind.ANNIHILATE.value
            )
            exact = columns.conj().T @ (annihilator.matrix @ columns)
            predicted = predicted_action(space, basis, U, V, a)
            expected = predicted[samples][:, samples].toarray()
            worst = max(worst, float(np.max(np.abs(exact - expected))))
        deviations.append(worst)
    return deviations


async def crosscheck_command(cfg: 'LabConfig', pool: WorkerPool) -> Report:
    model = Model(cfg)
    space = model.modes
    study = cfg.study
    model.check_times(study.times)
    report = Report('crosscheck')
    series = model.series
    blocks = []
    for t in study.times:
        pair = series.pair_at(t)
        blocks.append((pair.U, pair.V))
    dt = study.quadratic_dt or model.trajectory.dt

    tasks = [
        CrosscheckTask(
            space,
            model.trajectory,
            n_max,
            study.crosscheck_particles,
            list(study.times),
            blocks,
            dt,
        )
        for n_max in study.n_max
    ]
    results = await pool.map(crosscheck_task, tasks)

    table = report.table('crosscheck.csv', ['n_max', 't', 'deviation'])
    for n_max, deviations in zip(study.n_max, results):
        for t, dev in zip(study.times, deviations):
            table.add(n_max, t, dev)

    limit = study.thresholds.crosscheck
    for ti, t in enumerate(study.times):
        series_dev = [deviations[ti] for deviations in results]
        first, last = series_dev[0], series_dev[-1]
        report.results['deviation_t%g' % t] = series_dev
        report.check(Criterion.at_most('deviation_t%g' % t, last, limit))
        if len(series_dev) > 1:
            report.check(
                Criterion.at_most(
                    'convergence_t%g' % t,
                    last,
                    max(first, EXACT_DEVIATION),
                )
            )
        elif last > limit:
            logger.warning(
                'Deviation %.3e at t=%g from a single truncation, '
                'add larger n_max values to show convergence',
                last,
                t,
            )
    return report
