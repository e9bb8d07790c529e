from typing import List, Optional, Tuple

from pydantic import Field, validator

from ..config import Section
from ..space import ObservableConfig, ObservableKind


class ThresholdConfig(Section):
    clt_slope: float = Field(
        -0.4, description="Наибольший наклон ошибки ЦПТ от N"
    )
    clt_residual: float = Field(
        0.15, gt=0, description="Наибольшая невязка подгонки ЦПТ"
    )
    oracle: float = Field(
        1e-9, gt=0, description="Допуск сверки с оракулом при t=0"
    )
    reality: float = Field(
        1e-9, gt=0, description="Допуск |Im Sigma| коммутирующего семейства"
    )
    berry_esseen_slope: float = Field(
        -0.3, description="Наибольший наклон ошибки Берри-Эссеена"
    )
    density_slope: Tuple[float, float] = Field(
        (-1.3, -0.7), description="Окно наклона следового расстояния"
    )
    lln_ratio: float = Field(
        4.0, gt=1, description="Допустимый разброс N Var(dG(O)/N) по N"
    )
    fluctuation_slope: float = Field(
        -0.4, description="Наибольший наклон |(U_N - U_inf) Omega|"
    )
    number_growth: float = Field(
        2.0, gt=1, description="Допустимый разброс <N> по N"
    )
    crosscheck: float = Field(
        1e-5, gt=0, description="Допуск сверки действия Боголюбова"
    )
    order_margin: float = Field(
        0.5, gt=0, description="Допустимое отставание порядка сходимости"
    )


def _default_observable() -> ObservableConfig:
    return ObservableConfig(kind=ObservableKind.SIGMA_X)


class StudyConfig(Section):
    N: List[int] = Field(
        [16, 32, 64, 128, 256, 512, 1024],
        description="Список числа частиц (строго возрастает)",
    )
    times: List[float] = Field(
        [0.0, 0.5, 1.0], description="Моменты времени для сравнения"
    )
    families: List[str] = Field(
        ['commuting', 'noncommuting'],
        description="Семейства наблюдаемых из секции observables",
    )
    observable: ObservableConfig = Field(
        default_factory=_default_observable,
        description="Наблюдаемая для оценки Берри-Эссеена",
    )
    interval: Tuple[float, float] = Field(
        (-1.0, 1.0), description="Интервал [alpha, beta]"
    )
    tau_max: float = Field(3.0, gt=0, description="Граница сетки по tau")
    tau_points: int = Field(
        13, ge=5, description="Число узлов сетки по каждой оси tau"
    )
    fit_skip: int = Field(
        1, ge=0, description="Сколько наименьших N исключить из подгонки"
    )
    n_max: List[int] = Field(
        [8, 16, 32],
        description="Усечения пространства Фока для сверки Боголюбова",
    )
    crosscheck_particles: int = Field(
        2, ge=1, description="Наибольшее число частиц в пробных состояниях"
    )
    quadratic_dt: Optional[float] = Field(
        None, gt=0, description="Шаг квадратичной динамики (по умолчанию "
        "шаг hartree)",
    )
    dt_values: List[float] = Field(
        [8e-3, 4e-3, 2e-3, 1e-3],
        description="Шаги для измерения порядка сходимости",
    )
    thresholds: ThresholdConfig = Field(
        ThresholdConfig(), description="Пороги критериев приёмки"
    )

    @validator('N')
    def _increasing(cls, v: List[int]) -> List[int]:
        if any(n < 1 for n in v):
            raise ValueError('particle numbers must be positive')
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError('N list must be strictly increasing')
        return v

    @validator('times')
    def _times(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError('at least one time is needed')
        if any(t < 0 for t in v):
            raise ValueError('times must be >= 0')
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError('times must be strictly increasing')
        return v

    @validator('interval')
    def _interval(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        if v[1] < v[0]:
            raise ValueError('alpha must not exceed beta')
        return v

    @validator('dt_values')
    def _dt_values(cls, v: List[float]) -> List[float]:
        if any(dt <= 0 for dt in v):
            raise ValueError('steps must be positive')
        if any(b >= a for a, b in zip(v, v[1:])):
            raise ValueError('steps must be strictly decreasing')
        return v

    @validator('n_max')
    def _n_max(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError('at least one truncation is needed')
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError('truncations must be strictly increasing')
        return v
