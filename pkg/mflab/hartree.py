import logging
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import Field, validator
from scipy import fft

from .config import Section
from .error import HartreeError
from .logger import Span, wrap2span
from .misc import ctx_span_get
from .space import GridSpace, ModeSpace, SingleParticleSpace, SpaceKind

logger = logging.getLogger('mflab')

NORM_TOLERANCE = 1e-10
ENERGY_TOLERANCE = 1e-7


class HartreeMethod(str, Enum):
    RK4 = 'rk4'
    STRANG = 'strang'


NOMINAL_ORDER = {
    HartreeMethod.RK4.value: 4,
    HartreeMethod.STRANG.value: 2,
}


class InitialKind(str, Enum):
    PLANE_WAVE = 'plane_wave'
    GAUSSIAN = 'gaussian'
    COEFFICIENTS = 'coefficients'


class InitialStateConfig(Section):
    kind: InitialKind = Field(
        InitialKind.COEFFICIENTS, description="Вид начального состояния"
    )
    k: List[int] = Field(
        [0],
        description="Волновой вектор (plane_wave); для two_mode номер моды",
    )
    center: Optional[float] = Field(
        None, description="Центр гауссова пакета (по умолчанию L/2)"
    )
    width: float = Field(0.5, gt=0, description="Ширина гауссова пакета")
    momentum: int = Field(0, description="Импульс гауссова пакета")
    re: List[float] = Field(
        [0.8, 0.6], description="Вещественные части коэффициентов"
    )
    im: Optional[List[float]] = Field(
        None, description="Мнимые части коэффициентов"
    )


class HartreeConfig(Section):
    T: float = Field(1.0, gt=0, description="Время моделирования")
    dt: float = Field(1e-3, gt=0, description="Шаг по времени")
    method: HartreeMethod = Field(
        HartreeMethod.RK4, description="Схема: rk4 или strang (только grid)"
    )
    renormalize: bool = Field(
        False, description="Нормировать состояние после каждого шага"
    )
    norm_tolerance: float = Field(
        1e-6, gt=0, description="Допустимый дрейф нормы"
    )
    initial: InitialStateConfig = Field(
        InitialStateConfig(), description="Начальное состояние"
    )
    dump_every: int = Field(
        1, ge=1, description="Шаг прореживания траектории в CSV"
    )

    @validator('dt')
    def _dt_below_t(cls, v: float, values: dict) -> float:
        if 'T' in values and v > values['T']:
            raise ValueError('must not exceed T')
        return v


def time_steps(T: float, dt: float) -> int:
    """Number of steps of size dt covering [0, T]; dt must divide T."""
    if dt <= 0 or T <= 0:
        raise HartreeError('T and dt must be positive, got %r, %r' % (T, dt))
    steps = int(round(T / dt))
    if steps < 1 or abs(steps * dt - T) > 1e-9 * T:
        raise HartreeError('dt=%r does not divide T=%r' % (dt, T))
    return steps


def hartree_rhs(space: SingleParticleSpace, c: np.ndarray) -> np.ndarray:
    pot = space.convolve(space.density(c))
    return -1j * (space.apply_kinetic(c) + space.multiply(pot, c))


def hartree_energy(space: SingleParticleSpace, c: np.ndarray) -> float:
    pot = space.convolve(space.density(c))
    kinetic = space.inner(c, space.apply_kinetic(c)).real
    return kinetic + 0.5 * space.inner(c, space.multiply(pot, c)).real


def initial_state(
    space: SingleParticleSpace, cfg: InitialStateConfig
) -> np.ndarray:
    kind = InitialKind(cfg.kind)
    if kind == InitialKind.COEFFICIENTS:
        coeffs = np.asarray(cfg.re, dtype=complex)
        if cfg.im is not None:
            if len(cfg.im) != len(cfg.re):
                raise HartreeError('re and im must have the same length')
            coeffs = coeffs + 1j * np.asarray(cfg.im, dtype=float)
        if coeffs.shape != (space.dim,):
            raise HartreeError(
                '%d coefficients given, the space has dimension %d'
                % (len(coeffs), space.dim)
            )
        return space.normalize(coeffs / np.sqrt(space.weight))

    if isinstance(space, GridSpace):
        ks = list(cfg.k) + [0] * (space.d - len(cfg.k))
        x = space.positions
        axes = np.meshgrid(*([x] * space.d), indexing='ij')
        if kind == InitialKind.PLANE_WAVE:
            phase = sum(
                2 * np.pi * k * xi / space.length for k, xi in zip(ks, axes)
            )
            state = np.exp(1j * phase) / np.sqrt(space.length ** space.d)
            return state.ravel().astype(complex)
        return space.normalize(_gaussian_packet(space, cfg).ravel())

    assert isinstance(space, ModeSpace)
    if kind == InitialKind.PLANE_WAVE:
        label = cfg.k[0]
        if space.kind == SpaceKind.FOURIER:
            if label not in space.labels:
                raise HartreeError('Mode k=%d is not kept' % label)
            index = space.labels.index(label)
        elif 0 <= label < space.dim:
            index = label
        else:
            raise HartreeError('Mode index %d out of range' % label)
        return space.basis_vector(index)
    if space.kind != SpaceKind.FOURIER:
        raise HartreeError(
            'Gaussian initial states need a grid or Fourier space'
        )
    # project a finely sampled packet onto the kept modes
    length = float(space.length or 2 * np.pi)
    points = 256
    fine = _gaussian_samples(length, points, cfg)
    coeffs = fft.fft(fine) * (length / points) / np.sqrt(length)
    ks = np.asarray(space.labels)
    return space.normalize(coeffs[np.mod(ks, points)])


def _gaussian_samples(
    length: float, points: int, cfg: InitialStateConfig
) -> np.ndarray:
    x = np.arange(points) * length / points
    center = length / 2 if cfg.center is None else cfg.center
    y = np.mod(x - center + length / 2, length) - length / 2
    return np.exp(-(y ** 2) / (2 * cfg.width ** 2)) * np.exp(
        2j * np.pi * cfg.momentum * x / length
    )


def _gaussian_packet(space: GridSpace, cfg: InitialStateConfig) -> np.ndarray:
    profile = _gaussian_samples(space.length, space.points, cfg)
    packet = profile
    for _ in range(space.d - 1):
        packet = np.multiply.outer(packet, profile)
    return packet


class HartreeTrajectory:
    """Hartree solution stored at every step.

    Off-node values come from cubic Hermite interpolation using the
    stored time derivatives, so the error is O(dt^4) in between nodes.
    """

    def __init__(
        self,
        space: SingleParticleSpace,
        dt: float,
        states: np.ndarray,
        derivatives: np.ndarray,
        energy: np.ndarray,
        norms: np.ndarray,
        method: str,
    ) -> None:
        self.space = space
        self.dt = dt
        self.states = states
        self.derivatives = derivatives
        self.energy = energy
        self.norms = norms
        self.method = method
        self.steps = len(states) - 1
        self.times = np.arange(self.steps + 1) * dt

    @property
    def T(self) -> float:
        return self.steps * self.dt

    @property
    def phi0(self) -> np.ndarray:
        return self.states[0]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def node(self, t: float) -> Optional[int]:
        i = int(round(t / self.dt))
        if 0 <= i <= self.steps and abs(i * self.dt - t) <= 1e-9 * self.dt:
            return i
        return None

    def at(self, t: float) -> np.ndarray:
        eps = 1e-12 * max(1.0, self.T)
        if t < -eps or t > self.T + eps:
            raise HartreeError(
                't=%r is outside the solved range [0, %r]' % (t, self.T)
            )
        i = self.node(t)
        if i is not None:
            return self.states[i]
        i = min(max(int(np.floor(t / self.dt)), 0), self.steps - 1)
        s = (t - i * self.dt) / self.dt
        h00 = 2 * s ** 3 - 3 * s ** 2 + 1
        h10 = s ** 3 - 2 * s ** 2 + s
        h01 = -2 * s ** 3 + 3 * s ** 2
        h11 = s ** 3 - s ** 2
        return (
            h00 * self.states[i]
            + h10 * self.dt * self.derivatives[i]
            + h01 * self.states[i + 1]
            + h11 * self.dt * self.derivatives[i + 1]
        )

    def energy_drift(self) -> float:
        e0 = self.energy[0]
        return float(np.max(np.abs(self.energy - e0)) / max(1.0, abs(e0)))

    def norm_deviation(self) -> float:
        return float(np.max(np.abs(self.norms - 1.0)))


def _rk4_step(
    space: SingleParticleSpace, c: np.ndarray, dt: float
) -> np.ndarray:
    k1 = hartree_rhs(space, c)
    k2 = hartree_rhs(space, c + 0.5 * dt * k1)
    k3 = hartree_rhs(space, c + 0.5 * dt * k2)
    k4 = hartree_rhs(space, c + dt * k3)
    return c + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _strang_step(space: GridSpace, c: np.ndarray, dt: float) -> np.ndarray:
    c = space.kinetic_phase(c, dt / 2)
    # multiplying by a unimodular phase keeps |c| pointwise, hence the
    # potential V * |c|^2 is constant during this substep
    pot = space.convolve(space.density(c))
    c = np.exp(-1j * dt * pot) * c
    return space.kinetic_phase(c, dt / 2)


@wrap2span(name='hartree_evolve', kind=Span.KIND_SOLVER)
def evolve_hartree(
    space: SingleParticleSpace,
    phi0: np.ndarray,
    T: float,
    dt: float,
    method: str = HartreeMethod.RK4.value,
    renormalize: bool = False,
    norm_tolerance: float = 1e-6,
) -> HartreeTrajectory:
    method = HartreeMethod(method).value
    span = ctx_span_get()
    if span is not None:
        span.tag('hartree.method', method)

    steps = time_steps(T, dt)
    phi0 = np.asarray(phi0, dtype=complex)
    if abs(space.norm(phi0) - 1.0) > NORM_TOLERANCE:
        raise HartreeError(
            'Initial state has norm %.12f, expected 1' % space.norm(phi0)
        )
    if method == HartreeMethod.STRANG:
        if not isinstance(space, GridSpace):
            raise HartreeError('Strang splitting needs a grid space')
        step = _strang_step
    else:
        step = _rk4_step  # type: ignore

    states = np.empty((steps + 1, space.dim), dtype=complex)
    derivatives = np.empty_like(states)
    energy = np.empty(steps + 1)
    norms = np.empty(steps + 1)

    c = phi0
    for i in range(steps + 1):
        if i > 0:
            c = step(space, c, dt)  # type: ignore
        norm = space.norm(c)
        if abs(norm - 1.0) > norm_tolerance:
            raise HartreeError(
                'Norm drift %.3e exceeds %.1e at t=%.6g'
                % (abs(norm - 1.0), norm_tolerance, i * dt)
            )
        if renormalize:
            c = c / norm
        states[i] = c
        derivatives[i] = hartree_rhs(space, c)
        energy[i] = hartree_energy(space, c)
        norms[i] = norm

    traj = HartreeTrajectory(
        space, dt, states, derivatives, energy, norms, method
    )
    drift = traj.energy_drift()
    if drift > ENERGY_TOLERANCE:
        logger.warning(
            'Hartree energy drift %.3e exceeds %.1e (dt=%g, %s)',
            drift,
            ENERGY_TOLERANCE,
            dt,
            method,
        )
    return traj
