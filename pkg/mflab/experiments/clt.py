"""Multivariate central limit study.

For every N the exact characteristic function of the centred, rescaled
observables under the N-body dynamics is compared on a tensor tau grid
with the complex Gaussian exp(-1/2 tau Sigma(t) tau).
"""
import logging
from typing import TYPE_CHECKING, Dict, List, NamedTuple, Sequence

import numpy as np
from scipy.linalg import eigh

from ..covariance import gaussian_charfn, tau_grid
from ..error import StudyError
from ..fock import (
    CentredFamily,
    OccupationBasis,
    build_hamiltonian,
    product_state,
)
from ..fock.states import evolve_times
from ..logger import Span, wrap2span
from ..misc import ctx_span_get
from ..pool import WorkerPool
from ..space import ModeSpace, Observable
from .fit import fit_rate
from .model import Model
from .report import Criterion, Report

if TYPE_CHECKING:  # pragma: no cover
    from ..lab import LabConfig

logger = logging.getLogger('mflab')

MAX_FAMILY_SIZE = 3


def _single_particle_factors(
    phi: np.ndarray, observables: Sequence[Observable], N: int
) -> List[tuple]:
    factors = []
    for o in observables:
        mean = float(np.vdot(phi, o.apply(phi)).real)
        evals, evecs = eigh(o.matrix - mean * np.eye(o.dim))
        factors.append((evals / np.sqrt(N), evecs))
    return factors


def _oracle_value(
    phi: np.ndarray, factors: List[tuple], tau: Sequence[float], N: int
) -> complex:
    M = np.eye(len(phi), dtype=complex)
    for (evals, evecs), t in zip(factors, tau):
        M = M @ ((evecs * np.exp(1j * t * evals)) @ evecs.conj().T)
    return complex(np.vdot(phi, M @ phi)) ** N


def product_oracle_t0(
    phi: np.ndarray,
    observables: Sequence[Observable],
    tau: Sequence[float],
    N: int,
) -> complex:
    """(<phi, prod_j exp(i tau_j O_j / sqrt(N)) phi>)^N, O_j centred at phi.

    Independence of the particles in phi^(x)N reduces the N-body
    expectation to single-particle matrix exponentials.
    """
    phi = np.asarray(phi, dtype=complex)
    if len(tau) != len(observables):
        raise StudyError(
            'tau has %d entries for %d observables'
            % (len(tau), len(observables))
        )
    factors = _single_particle_factors(phi, observables, N)
    return _oracle_value(phi, factors, tau, N)


def product_oracle_grid(
    phi: np.ndarray,
    observables: Sequence[Observable],
    axis: np.ndarray,
    N: int,
) -> np.ndarray:
    phi = np.asarray(phi, dtype=complex)
    factors = _single_particle_factors(phi, observables, N)
    values = np.empty((len(axis),) * len(observables), dtype=complex)
    for index in np.ndindex(*values.shape):
        values[index] = _oracle_value(phi, factors, axis[list(index)], N)
    return values


class CltTask(NamedTuple):
    space: ModeSpace
    N: int
    phi0: np.ndarray
    times: List[float]
    phis: List[np.ndarray]
    families: Dict[str, List[Observable]]
    sigmas: Dict[str, List[np.ndarray]]
    tau_max: float
    tau_points: int


class CltPoint(NamedTuple):
    N: int
    family: str
    t: float
    err: float
    tau_index: int
    oracle_dev: float


@wrap2span(name='study_task', kind=Span.KIND_STUDY)
def clt_task(task: CltTask) -> List[CltPoint]:
    span = ctx_span_get()
    if span is not None:
        span.tag('study.name', 'clt')
        span.tag('study.N', str(task.N))
    space = task.space
    axis = np.linspace(-task.tau_max, task.tau_max, task.tau_points)
    basis = OccupationBasis.fixed(space.dim, task.N)
    H = build_hamiltonian(space, task.N, basis)
    initial = product_state(task.phi0, task.N, basis)
    states = evolve_times(H, initial, task.times)

    points = []
    for ti, (t, state) in enumerate(zip(task.times, states)):
        for name, observables in task.families.items():
            k = len(observables)
            family = CentredFamily(basis, observables, task.phis[ti])
            values = family.charfn_grid(state.coefficients, axis)
            grid = tau_grid(task.tau_max, task.tau_points, k)
            gauss = gaussian_charfn(task.sigmas[name][ti], grid)
            diff = np.abs(values - gauss)
            oracle_dev = float('nan')
            if t == 0:
                oracle = product_oracle_grid(
                    task.phi0, observables, axis, task.N
                )
                oracle_dev = float(np.max(np.abs(values - oracle)))
            points.append(
                CltPoint(
                    task.N,
                    name,
                    t,
                    float(np.max(diff)),
                    int(np.argmax(diff)),
                    oracle_dev,
                )
            )
    return points


async def clt_command(cfg: 'LabConfig', pool: WorkerPool) -> Report:
    model = Model(cfg)
    space = model.modes
    study = cfg.study
    limits = study.thresholds
    model.check_times(study.times)
    report = Report('clt')

    families = {name: model.family(name) for name in study.families}
    for name, observables in families.items():
        if not 1 <= len(observables) <= MAX_FAMILY_SIZE:
            raise StudyError(
                'Family %r has %d observables, the tau grid allows 1..%d'
                % (name, len(observables), MAX_FAMILY_SIZE)
            )
    covariances = {
        name: [model.covariance(name, t) for t in study.times]
        for name in families
    }
    sigmas = {
        name: [c.sigma for c in covs] for name, covs in covariances.items()
    }
    phis = [model.phi_at(t) for t in study.times]
    tasks = [
        CltTask(
            space,
            N,
            model.phi0,
            list(study.times),
            phis,
            families,
            sigmas,
            study.tau_max,
            study.tau_points,
        )
        for N in study.N
    ]
    results = await pool.map(clt_task, tasks)

    table = report.table(
        'clt.csv', ['N', 'family', 't', 'tau_index', 'err_abs', 'oracle_dev']
    )
    errors: Dict[tuple, List[float]] = {}
    oracle_devs = []
    for points in results:
        for p in points:
            table.add(p.N, p.family, p.t, p.tau_index, p.err, p.oracle_dev)
            errors.setdefault((p.family, p.t), []).append(p.err)
            if not np.isnan(p.oracle_dev):
                oracle_devs.append(p.oracle_dev)

    for name in families:
        for t in study.times:
            fit = report.fit(
                fit_rate(
                    'clt_%s_t%g' % (name, t),
                    study.N,
                    errors[(name, t)],
                    study.fit_skip,
                )
            )
            report.check(
                Criterion.at_most(
                    'clt_slope_%s_t%g' % (name, t),
                    fit.slope,
                    limits.clt_slope,
                )
            )
            report.check(
                Criterion.at_most(
                    'clt_residual_%s_t%g' % (name, t),
                    fit.residual,
                    limits.clt_residual,
                )
            )
    if oracle_devs:
        report.check(
            Criterion.at_most('oracle_t0', max(oracle_devs), limits.oracle)
        )

    for name in families:
        if not model.is_commuting(name):
            continue
        imag = max(
            c.imag_max() for c in (
                model.covariance(name, pair.t) for pair in model.series.pairs
            )
        )
        report.check(
            Criterion.at_most('reality_%s' % name, imag, limits.reality)
        )
    report.results['sigma'] = {
        name: [c.export() for c in covs]
        for name, covs in covariances.items()
    }
    return report
