import logging
import math
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel

from .fit import RateFit

logger = logging.getLogger('mflab')


class CriterionKind(str, Enum):
    AT_MOST = 'at_most'
    AT_LEAST = 'at_least'
    WITHIN = 'within'


class Criterion(BaseModel):
    name: str
    kind: CriterionKind
    value: Optional[float]
    threshold: Union[float, Tuple[float, float]]
    passed: bool

    class Config:
        use_enum_values = True

    @classmethod
    def at_most(cls, name: str, value: float, limit: float) -> 'Criterion':
        passed = not math.isnan(value) and value <= limit
        return cls(
            name=name,
            kind=CriterionKind.AT_MOST,
            value=_finite(value),
            threshold=limit,
            passed=passed,
        )

    @classmethod
    def at_least(cls, name: str, value: float, limit: float) -> 'Criterion':
        passed = not math.isnan(value) and value >= limit
        return cls(
            name=name,
            kind=CriterionKind.AT_LEAST,
            value=_finite(value),
            threshold=limit,
            passed=passed,
        )

    @classmethod
    def within(
        cls, name: str, value: float, window: Tuple[float, float]
    ) -> 'Criterion':
        lo, hi = window
        passed = not math.isnan(value) and lo <= value <= hi
        return cls(
            name=name,
            kind=CriterionKind.WITHIN,
            value=_finite(value),
            threshold=(lo, hi),
            passed=passed,
        )


def _finite(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


class Table:
    def __init__(self, columns: Sequence[str]) -> None:
        self.columns = list(columns)
        self.rows: List[List[Any]] = []

    def add(self, *row: Any) -> None:
        self.rows.append(list(row))

    def __len__(self) -> int:
        return len(self.rows)


class Report:
    """Tables, fits and pass/fail criteria of one command."""

    def __init__(self, command: str) -> None:
        self.command = command
        self.tables: Dict[str, Table] = {}
        self.fits: List[RateFit] = []
        self.criteria: List[Criterion] = []
        self.results: Dict[str, Any] = {}

    def table(self, name: str, columns: Sequence[str]) -> Table:
        table = Table(columns)
        self.tables[name] = table
        return table

    def fit(self, fit: RateFit) -> RateFit:
        self.fits.append(fit)
        return fit

    def check(self, criterion: Criterion) -> Criterion:
        self.criteria.append(criterion)
        if not criterion.passed:
            logger.warning(
                'Criterion %s failed: %s not %s %s',
                criterion.name,
                criterion.value,
                criterion.kind,
                criterion.threshold,
            )
        return criterion

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def summary(self) -> Dict[str, Any]:
        return {
            'criteria': [c.dict() for c in self.criteria],
            'fits': [f.summary() for f in self.fits],
            'passed': self.passed,
            'results': self.results,
        }
