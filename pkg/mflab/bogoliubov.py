"""Bogoliubov transformation along a Hartree trajectory.

Theta(t; 0) acts on pairs (f, g) and is stored as the 2m x 2m matrix

    [[U, J V J],
     [V, J U J]]

with J X J realised as ``conj(X[pi][:, pi])``. The generator

    A(t) = [[D, -J B J],
            [B, -J D J]]

is rebuilt from the (interpolated) Hartree state at every substep and
Theta solves dTheta/dt = THETA_SIGN * i Theta A(t). With the + sign both
the free closed form U(t; 0) = exp(itK) and the Hartree pair invariant
U phi_t + J V phi_t = phi_0 hold.
"""
import logging
from enum import Enum
from typing import Dict, List, NamedTuple, Optional

import numpy as np
from pydantic import Field
from scipy.linalg import expm

from .config import Section
from .error import BogoliubovError
from .hartree import HartreeTrajectory, time_steps
from .logger import Span, wrap2span
from .misc import ctx_span_get
from .space import SingleParticleSpace

logger = logging.getLogger('mflab')

THETA_SIGN = 1.0
STATE_NORM_TOLERANCE = 1e-8
STRUCTURE_TOLERANCE = 1e-8


class BogoliubovIntegrator(str, Enum):
    RK4 = 'rk4'
    MAGNUS = 'midpoint_magnus'


NOMINAL_ORDER = {
    BogoliubovIntegrator.RK4.value: 4,
    BogoliubovIntegrator.MAGNUS.value: 2,
}


class BogoliubovConfig(Section):
    dt: Optional[float] = Field(
        None, gt=0, description="Шаг (по умолчанию шаг hartree)"
    )
    integrator: BogoliubovIntegrator = Field(
        BogoliubovIntegrator.RK4,
        description="Интегратор: rk4 или midpoint_magnus",
    )
    tolerance: float = Field(
        1e-8, gt=0, description="Допуск симплектических невязок r1, r2"
    )
    pair_tolerance: float = Field(
        1e-6, gt=0, description="Допуск невязки r3 (инвариант пары Хартри)"
    )
    record_every: int = Field(
        1, ge=1, description="Сохранять каждый n-й узел"
    )


def _check_state(space: SingleParticleSpace, phi: np.ndarray) -> None:
    norm = space.norm(phi)
    if abs(norm - 1.0) > STATE_NORM_TOLERANCE:
        raise BogoliubovError('Hartree state has norm %.12f' % norm)


def apply_D(
    space: SingleParticleSpace, phi: np.ndarray, f: np.ndarray
) -> np.ndarray:
    _check_state(space, phi)
    pot = space.convolve(space.density(phi))
    return (
        space.apply_kinetic(f)
        + space.multiply(pot, f)
        + space.pair_apply(phi, f, phi)
    )


def apply_B(
    space: SingleParticleSpace, phi: np.ndarray, f: np.ndarray
) -> np.ndarray:
    _check_state(space, phi)
    return space.pair_apply(phi, f, space.conjugate(phi))


class GeneratorBlocks(NamedTuple):
    D: np.ndarray
    B: np.ndarray
    t: float

    def matrix(self, space: SingleParticleSpace) -> np.ndarray:
        jbj = space.conjugate_matrix(self.B)
        jdj = space.conjugate_matrix(self.D)
        return np.block([[self.D, -jbj], [self.B, -jdj]])


def structure_residuals(
    space: SingleParticleSpace, blocks: GeneratorBlocks
) -> Dict[str, float]:
    perm = space.conj_perm
    d_defect = np.max(np.abs(blocks.D - blocks.D.conj().T))
    b_defect = np.max(np.abs(blocks.B.T - blocks.B[np.ix_(perm, perm)]))
    return {'D': float(d_defect), 'B': float(b_defect)}


def assemble_generator(
    space: SingleParticleSpace,
    phi: np.ndarray,
    t: float = 0.0,
    check: bool = True,
) -> GeneratorBlocks:
    eye = np.eye(space.dim, dtype=complex)
    pot = space.convolve(space.density(phi))
    D = (
        space.kinetic
        + space.potential_matrix(pot)
        + space.pair_apply(phi, eye, phi)
    )
    B = space.pair_apply(phi, eye, space.conjugate(phi))
    blocks = GeneratorBlocks(D=D, B=B, t=t)
    if check:
        defects = structure_residuals(space, blocks)
        for name, defect in defects.items():
            if defect > STRUCTURE_TOLERANCE:
                raise BogoliubovError(
                    'Generator block %s violates its symmetry by %.3e '
                    'at t=%.6g' % (name, defect, t)
                )
    return blocks


class Residuals(NamedTuple):
    r1: float
    r2: float
    r3: float


class BogoliubovPair:
    def __init__(
        self,
        space: SingleParticleSpace,
        theta: np.ndarray,
        t: float,
        phi_t: np.ndarray,
        phi0: np.ndarray,
    ) -> None:
        m = space.dim
        self.space = space
        self.theta = theta
        self.U = theta[:m, :m]
        self.V = theta[m:, :m]
        self.t = t
        self.phi_t = phi_t
        self.phi0 = phi0
        self.residuals = symplectic_residuals(self)

    def apply(self, f: np.ndarray) -> np.ndarray:
        """U f + J(V f), the first component of Theta (f, Jf)."""
        return self.U @ f + self.space.conjugate(self.V @ f)

    def __repr__(self) -> str:
        return 'BogoliubovPair(t=%g, r=%s)' % (self.t, tuple(self.residuals))


def symplectic_residuals(pair: BogoliubovPair) -> Residuals:
    space = pair.space
    U, V = pair.U, pair.V
    eye = np.eye(space.dim)
    r1 = np.linalg.norm(U.conj().T @ U - V.conj().T @ V - eye)
    jvj = space.conjugate_matrix(V)
    juj = space.conjugate_matrix(U)
    r2 = np.linalg.norm(U.conj().T @ jvj - V.conj().T @ juj)
    r3 = space.norm(pair.apply(pair.phi_t) - pair.phi0)
    return Residuals(float(r1), float(r2), float(r3))


class BogoliubovSeries:
    def __init__(
        self,
        trajectory: HartreeTrajectory,
        dt: float,
        integrator: str,
        pairs: List[BogoliubovPair],
    ) -> None:
        self.trajectory = trajectory
        self.dt = dt
        self.integrator = integrator
        self.pairs = pairs

    @property
    def final(self) -> BogoliubovPair:
        return self.pairs[-1]

    @property
    def times(self) -> np.ndarray:
        return np.array([p.t for p in self.pairs])

    def pair_at(self, t: float) -> BogoliubovPair:
        for pair in self.pairs:
            if abs(pair.t - t) <= 1e-9 * max(self.dt, 1.0):
                return pair
        raise BogoliubovError(
            't=%r is not a recorded node (dt=%r)' % (t, self.dt)
        )

    def max_residuals(self) -> Residuals:
        return Residuals(
            *(max(p.residuals[i] for p in self.pairs) for i in range(3))
        )


@wrap2span(name='bogoliubov_propagate', kind=Span.KIND_SOLVER)
def propagate_theta(
    trajectory: HartreeTrajectory,
    dt: Optional[float] = None,
    integrator: str = BogoliubovIntegrator.RK4.value,
    tolerance: float = 1e-8,
    record_every: int = 1,
) -> BogoliubovSeries:
    integrator = BogoliubovIntegrator(integrator).value
    span = ctx_span_get()
    if span is not None:
        span.tag('bogoliubov.integrator', integrator)

    space = trajectory.space
    dt = trajectory.dt if dt is None else dt
    steps = time_steps(trajectory.T, dt)
    limit = 10 * tolerance
    phi0 = trajectory.phi0
    m = space.dim

    def generator(t: float) -> np.ndarray:
        phi = trajectory.at(t)
        return assemble_generator(space, phi, t).matrix(space)

    theta = np.eye(2 * m, dtype=complex)
    pairs = [BogoliubovPair(space, theta.copy(), 0.0, phi0, phi0)]
    a_start = generator(0.0)
    factor = THETA_SIGN * 1j
    for n in range(steps):
        t = n * dt
        a_mid = generator(t + dt / 2)
        if integrator == BogoliubovIntegrator.MAGNUS:
            theta = theta @ expm(factor * dt * a_mid)
        else:
            a_end = generator(t + dt)
            k1 = factor * theta @ a_start
            k2 = factor * (theta + 0.5 * dt * k1) @ a_mid
            k3 = factor * (theta + 0.5 * dt * k2) @ a_mid
            k4 = factor * (theta + dt * k3) @ a_end
            theta = theta + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            a_start = a_end

        done = n + 1
        if done % record_every and done != steps:
            continue
        t_node = done * dt
        pair = BogoliubovPair(
            space, theta.copy(), t_node, trajectory.at(t_node), phi0
        )
        r = pair.residuals
        if r.r1 > limit or r.r2 > limit:
            raise BogoliubovError(
                'Symplectic residuals r1=%.3e r2=%.3e exceed %.1e at t=%.6g'
                % (r.r1, r.r2, limit, t_node)
            )
        pairs.append(pair)

    return BogoliubovSeries(trajectory, dt, integrator, pairs)
