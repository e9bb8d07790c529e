"""The xi subcommand: recursion checks, weighted norms and rates in N."""
import logging
import math
from typing import TYPE_CHECKING, List, NamedTuple

import numpy as np
from scipy.special import gammaln

from ..logger import Span, wrap2span
from ..misc import ctx_span_get
from ..pool import WorkerPool
from ..xi import XiNorms, xi_closed_form, xi_infinity, xi_norms, xi_recursion
from .fit import MIN_POINTS, fit_rate
from .report import Criterion, Report

if TYPE_CHECKING:  # pragma: no cover
    from ..lab import LabConfig

logger = logging.getLogger('mflab')


class XiTask(NamedTuple):
    N: int
    ell_check: int
    ell_top: int


class XiResult(NamedTuple):
    norms: XiNorms
    agreement: float
    ell_checked: int
    w: np.ndarray


def closed_form_deviation(N: int, ell_max: int) -> float:
    """Largest |w_rec - w_closed| / max(|w_closed|, 1) for l <= ell_max."""
    w = xi_recursion(N, max(ell_max, 2)).w
    worst = 0.0
    for ell in range(ell_max + 1):
        closed = xi_closed_form(N, ell) * math.exp(0.5 * gammaln(ell + 1))
        worst = max(worst, abs(w[ell] - closed) / max(abs(closed), 1.0))
    return worst


@wrap2span(name='study_task', kind=Span.KIND_STUDY)
def xi_task(task: XiTask) -> XiResult:
    span = ctx_span_get()
    if span is not None:
        span.tag('study.name', 'xi')
        span.tag('study.N', str(task.N))
    ell_checked = min(task.ell_check, task.N)
    agreement = closed_form_deviation(task.N, ell_checked)
    norms = xi_norms(task.N)
    w = xi_recursion(task.N, max(task.ell_top, 2)).w
    return XiResult(norms, agreement, ell_checked, w)


async def xi_command(cfg: 'LabConfig', pool: WorkerPool) -> Report:
    x = cfg.xi
    report = Report('xi')
    ell_top = max(x.ell_rates) if x.ell_rates else 2
    tasks = [XiTask(N, x.ell_check, ell_top) for N in x.N]
    results: List[XiResult] = await pool.map(xi_task, tasks)

    table = report.table(
        'xi_norms.csv',
        [
            'N',
            'ell_max',
            'apriori',
            'total',
            'd_squared',
            'ratio',
            'diff5',
            'agreement',
        ],
    )
    for r in results:
        n = r.norms
        table.add(
            n.N,
            n.ell_max,
            n.apriori,
            n.total,
            n.d_squared,
            n.ratio,
            n.diff5,
            r.agreement,
        )
        report.check(
            Criterion.at_most('agreement_N%d' % n.N, r.agreement, x.agreement)
        )
        report.check(
            Criterion.at_most('apriori_N%d' % n.N, n.apriori, x.apriori_bound)
        )
        report.check(
            Criterion.at_most(
                'ratio_N%d' % n.N, abs(n.ratio - 1.0), x.ratio_window
            )
        )

    fit = report.fit(
        fit_rate(
            'xi_diff5',
            [r.norms.N for r in results],
            [r.norms.diff5 for r in results],
            x.fit_skip,
        )
    )
    report.check(
        Criterion.at_most('diff5_slope', fit.slope, x.diff5_slope_max)
    )

    w_inf = xi_infinity(max(ell_top, 2)).w
    rates = report.table('xi_rates.csv', ['ell', 'N', 'w', 'w_inf', 'err'])
    odd_window = (x.odd_slope[0], x.odd_slope[1])
    for ell in x.ell_rates:
        Ns = []
        errors = []
        for r in results:
            err = abs(r.w[ell] - w_inf[ell])
            rates.add(ell, r.norms.N, r.w[ell], w_inf[ell], err)
            # N < l^2 is pre-asymptotic for the l-th coefficient
            if r.norms.N >= ell ** 2:
                Ns.append(r.norms.N)
                errors.append(err)
        if len(Ns) < MIN_POINTS:
            logger.info(
                'No pointwise rate for l=%d: %d values of N >= %d',
                ell,
                len(Ns),
                ell ** 2,
            )
            continue
        rate = report.fit(fit_rate('xi_pointwise_l%d' % ell, Ns, errors, 0))
        if rate.exact:
            continue
        if ell % 2:
            report.check(
                Criterion.within('slope_l%d' % ell, rate.slope, odd_window)
            )
        elif ell >= 4:
            report.check(
                Criterion.at_most(
                    'slope_l%d' % ell, rate.slope, x.even_slope_max
                )
            )
    report.results['ell_checked'] = {
        str(r.norms.N): r.ell_checked for r in results
    }
    return report
