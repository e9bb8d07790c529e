import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel
from scipy.stats import linregress

from ..error import StudyError

logger = logging.getLogger('mflab')

MIN_POINTS = 3
# errors at or below this are rounding noise of O(1) quantities
EXACT = 1e-11


class RateFit(BaseModel):
    quantity: str
    variable: str = 'N'
    x: List[float]
    errors: List[float]
    window: List[float]
    slope: float
    slope_stderr: float
    intercept: float
    residual: float
    exact: bool = False

    def summary(self) -> dict:
        data = self.dict()
        for key in ('slope', 'slope_stderr', 'intercept', 'residual'):
            if not math.isfinite(data[key]):
                data[key] = None
        return data


def fit_rate(
    quantity: str,
    x: Sequence[float],
    errors: Sequence[float],
    skip: int = 1,
    variable: str = 'N',
) -> RateFit:
    """Least-squares slope of log(error) against log(x).

    The ``skip`` smallest x values are left out of the fit. When every
    error in the window is at rounding level the fit is reported as
    exact with slope -inf.
    """
    if len(x) != len(errors):
        raise StudyError(
            '%s: %d abscissae for %d errors' % (quantity, len(x), len(errors))
        )
    order = np.argsort(np.asarray(x, dtype=float))
    xs = np.asarray(x, dtype=float)[order]
    es = np.asarray(errors, dtype=float)[order]
    window_x = xs[skip:]
    window_e = es[skip:]
    if len(window_x) < MIN_POINTS:
        raise StudyError(
            '%s: a rate fit needs %d points after skipping %d, got %d'
            % (quantity, MIN_POINTS, skip, len(window_x))
        )
    if np.any(~np.isfinite(window_e)):
        raise StudyError('%s: non-finite errors %s' % (quantity, window_e))

    base = dict(
        quantity=quantity,
        variable=variable,
        x=xs.tolist(),
        errors=es.tolist(),
        window=window_x.tolist(),
    )
    if np.all(window_e <= EXACT):
        return RateFit(
            slope=-math.inf,
            slope_stderr=0.0,
            intercept=-math.inf,
            residual=0.0,
            exact=True,
            **base,
        )
    if np.any(window_e <= 0):
        raise StudyError(
            '%s: zero error in the fit window next to nonzero ones'
            % quantity
        )
    log_x = np.log(window_x)
    log_e = np.log(window_e)
    res = linregress(log_x, log_e)
    predicted = res.intercept + res.slope * log_x
    residual = float(np.sqrt(np.mean((log_e - predicted) ** 2)))
    fit = RateFit(
        slope=float(res.slope),
        slope_stderr=float(res.stderr),
        intercept=float(res.intercept),
        residual=residual,
        **base,
    )
    logger.info(
        '%s: slope %.3f +- %.3f over %s=%s',
        quantity,
        fit.slope,
        fit.slope_stderr,
        variable,
        fit.window,
    )
    return fit


def self_convergence_order(
    quantity: str,
    steps: Sequence[float],
    differences: Sequence[float],
) -> Optional[RateFit]:
    """Observed order from |x(dt_i) - x(dt_{i+1})| against dt_i.

    Needs at least three differences, i.e. four step sizes.
    """
    if len(differences) < MIN_POINTS:
        return None
    return fit_rate(
        quantity, steps[: len(differences)], differences, 0, variable='dt'
    )


def spread_ratio(values: Sequence[float], floor: float = EXACT) -> float:
    """max/min of positive values, one when all of them vanish."""
    top = max(values)
    if top <= floor:
        return 1.0
    bottom = min(values)
    if bottom <= floor:
        return math.inf
    return top / bottom
