"""The hartree, bogoliubov and covariance subcommands."""
import logging
from typing import TYPE_CHECKING, Any, List, Tuple

import numpy as np

from ..bogoliubov import NOMINAL_ORDER as THETA_ORDER
from ..bogoliubov import propagate_theta
from ..covariance import covariance_at
from ..hartree import NOMINAL_ORDER as HARTREE_ORDER
from ..hartree import evolve_hartree, time_steps
from ..pool import WorkerPool
from ..space import SingleParticleSpace
from .fit import self_convergence_order
from .model import Model
from .report import Criterion, Report

if TYPE_CHECKING:  # pragma: no cover
    from ..lab import LabConfig

logger = logging.getLogger('mflab')

# amplitudes are dumped only for small spaces
MAX_DUMP_DIM = 64

HartreeTask = Tuple[SingleParticleSpace, np.ndarray, float, float, str]
ThetaTask = Tuple[
    SingleParticleSpace, np.ndarray, float, float, str, str, float
]


def hartree_final(task: HartreeTask) -> np.ndarray:
    space, phi0, T, dt, method = task
    return evolve_hartree(space, phi0, T, dt, method).final


def theta_final(task: ThetaTask) -> np.ndarray:
    space, phi0, T, dt, method, integrator, tolerance = task
    trajectory = evolve_hartree(space, phi0, T, dt, method)
    series = propagate_theta(
        trajectory,
        dt,
        integrator,
        tolerance,
        record_every=time_steps(T, dt),
    )
    return series.final.theta


def _check_order(
    report: Report,
    name: str,
    steps: List[float],
    differences: List[float],
    nominal: int,
    margin: float,
) -> None:
    report.results['%s_differences' % name] = differences
    fit = self_convergence_order(name, steps, differences)
    if fit is None:
        logger.info(
            'Order of %s not measured: %d step sizes given, 4 needed',
            name,
            len(steps),
        )
        return
    report.fit(fit)
    report.results['%s_nominal_order' % name] = nominal
    if fit.exact:
        return
    report.check(
        Criterion.at_least('%s_order' % name, fit.slope, nominal - margin)
    )


async def hartree_command(cfg: 'LabConfig', pool: WorkerPool) -> Report:
    model = Model(cfg)
    space = model.space
    traj = model.trajectory
    report = Report('hartree')

    columns = ['t', 'energy', 'norm']
    dump = space.dim <= MAX_DUMP_DIM
    if dump:
        for a in range(space.dim):
            columns += ['re_%d' % a, 'im_%d' % a]
    table = report.table('hartree_trajectory.csv', columns)
    every = cfg.hartree.dump_every
    for i in range(0, traj.steps + 1):
        if i % every and i != traj.steps:
            continue
        row: List[Any] = [traj.times[i], traj.energy[i], traj.norms[i]]
        if dump:
            for c in traj.states[i]:
                row += [c.real, c.imag]
        table.add(*row)

    report.results.update(
        method=traj.method,
        steps=traj.steps,
        dt=traj.dt,
        energy_drift=traj.energy_drift(),
        norm_deviation=traj.norm_deviation(),
    )
    report.check(
        Criterion.at_most(
            'norm_deviation',
            traj.norm_deviation(),
            cfg.hartree.norm_tolerance,
        )
    )

    steps = list(cfg.study.dt_values)
    h = cfg.hartree
    tasks = [(space, model.phi0, h.T, dt, traj.method) for dt in steps]
    finals = await pool.map(hartree_final, tasks)
    differences = [
        space.norm(a - b) for a, b in zip(finals[:-1], finals[1:])
    ]
    _check_order(
        report,
        'hartree',
        steps,
        differences,
        HARTREE_ORDER[traj.method],
        cfg.study.thresholds.order_margin,
    )
    return report


async def bogoliubov_command(cfg: 'LabConfig', pool: WorkerPool) -> Report:
    model = Model(cfg)
    space = model.space
    series = model.series
    b = cfg.bogoliubov
    report = Report('bogoliubov')

    table = report.table('bogoliubov_residuals.csv', ['t', 'r1', 'r2', 'r3'])
    for pair in series.pairs:
        table.add(pair.t, *pair.residuals)

    worst = series.max_residuals()
    report.results.update(
        integrator=series.integrator,
        dt=series.dt,
        nodes=len(series.pairs),
        max_r1=worst.r1,
        max_r2=worst.r2,
        max_r3=worst.r3,
    )
    if space.dim <= MAX_DUMP_DIM:
        final = series.final
        report.results['final'] = {
            't': final.t,
            'U': final.U,
            'V': final.V,
        }
    report.check(Criterion.at_most('max_r1', worst.r1, b.tolerance))
    report.check(Criterion.at_most('max_r2', worst.r2, b.tolerance))
    report.check(Criterion.at_most('max_r3', worst.r3, b.pair_tolerance))

    steps = list(cfg.study.dt_values)
    h = cfg.hartree
    tasks = [
        (
            space,
            model.phi0,
            h.T,
            dt,
            model.trajectory.method,
            series.integrator,
            b.tolerance,
        )
        for dt in steps
    ]
    finals = await pool.map(theta_final, tasks)
    differences = [
        float(np.linalg.norm(a - b)) for a, b in zip(finals[:-1], finals[1:])
    ]
    nominal = min(
        HARTREE_ORDER[model.trajectory.method],
        THETA_ORDER[series.integrator],
    )
    _check_order(
        report,
        'bogoliubov',
        steps,
        differences,
        nominal,
        cfg.study.thresholds.order_margin,
    )
    return report


async def covariance_command(cfg: 'LabConfig', pool: WorkerPool) -> Report:
    model = Model(cfg)
    series = model.series
    study = cfg.study
    model.check_times(study.times)
    report = Report('covariance')
    table = report.table(
        'covariance.csv', ['family', 't', 'i', 'j', 're', 'im']
    )
    exports = {}
    for name in study.families:
        commuting = model.is_commuting(name)
        imag_max = 0.0
        min_eig = np.inf
        family = model.family(name)
        for pair in series.pairs:
            cov = covariance_at(pair, pair.phi_t, family, commuting)
            for i in range(cov.k):
                for j in range(cov.k):
                    s = cov.sigma[i, j]
                    table.add(name, pair.t, i, j, s.real, s.imag)
            imag_max = max(imag_max, cov.imag_max())
            min_eig = min(min_eig, float(cov.eigs_P[0]))
        exports[name] = {
            'commuting': commuting,
            'imag_max': imag_max,
            'min_eig_reP': min_eig,
            'at': [model.covariance(name, t).export() for t in study.times],
        }
        if commuting:
            report.check(
                Criterion.at_most(
                    'reality_%s' % name, imag_max, study.thresholds.reality
                )
            )
    report.results['families'] = exports
    return report
