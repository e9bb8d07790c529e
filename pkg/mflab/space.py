"""Single-particle spaces.

Two backends share one interface. :class:`GridSpace` samples the torus
on a uniform grid and convolves by FFT; :class:`ModeSpace` keeps a finite
set of modes together with the two-body tensor

    W[a, b, c, d] = <e_a (x) e_b, V e_c (x) e_d>

and evaluates every product of fields by contracting ``W``. Fock-space
work always needs a :class:`ModeSpace`, so that mean-field and
many-body sides see the same single-particle space.

Units: hbar = 1, the kinetic operator is -Laplace on the torus.
"""
import logging
from abc import ABC, abstractmethod
from enum import Enum
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import Field, validator
from scipy import fft
from scipy.special import erf

from .config import Section
from .error import SpaceError

logger = logging.getLogger('mflab')

HERMITIAN_TOLERANCE = 1e-12
DENSITY_TOLERANCE = 1e-10

Potential = np.ndarray


class KernelKind(str, Enum):
    ZERO = 'zero'
    GAUSSIAN = 'gaussian'
    COSINE = 'cosine'
    TABULATED = 'tabulated'
    TABULATED_FOURIER = 'tabulated_fourier'


class SpaceKind(str, Enum):
    GRID = 'grid'
    FOURIER = 'fourier'
    TWO_MODE = 'two_mode'


class KernelConfig(Section):
    kind: KernelKind = Field(
        KernelKind.ZERO, description="Вид потенциала взаимодействия"
    )
    v0: float = Field(1.0, description="Амплитуда (gaussian, cosine)")
    sigma: float = Field(0.2, gt=0, description="Ширина гауссова ядра")
    n: int = Field(1, ge=1, description="Гармоника косинусного ядра")
    values: Optional[List[float]] = Field(
        None,
        description="Таблица: отсчёты V(x_j) на сетке (tabulated) "
        "или V^(q), q=0,1,... (tabulated_fourier)",
    )

    @validator('values', always=True)
    def _values_for_tables(
        cls, v: Optional[List[float]], values: dict
    ) -> Optional[List[float]]:
        kind = values.get('kind')
        tables = (KernelKind.TABULATED, KernelKind.TABULATED_FOURIER)
        if kind in tables and not v:
            raise ValueError('required for kind %s' % kind)
        return v


class SpaceConfig(Section):
    kind: SpaceKind = Field(
        SpaceKind.TWO_MODE, description="Тип одночастичного пространства"
    )
    d: int = Field(1, ge=1, le=3, description="Размерность тора (grid)")
    points: int = Field(16, description="Число узлов по оси (grid)")
    length: float = Field(
        2 * np.pi, gt=0, description="Длина ребра тора (grid, fourier)"
    )
    k_max: int = Field(1, ge=1, description="Максимальный импульс (fourier)")
    epsilon: float = Field(
        1.0, description="Энергия второй моды (two_mode)"
    )
    coupling: float = Field(
        1.0, description="Константа связи g (two_mode)"
    )
    kernel: KernelConfig = Field(
        KernelConfig(), description="Потенциал взаимодействия"
    )


class SingleParticleSpace(ABC):
    kind: str
    dim: int
    weight: float
    conj_perm: np.ndarray

    @property
    @abstractmethod
    def kinetic(self) -> np.ndarray:
        pass

    @abstractmethod
    def apply_kinetic(self, f: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def density(self, f: np.ndarray) -> Potential:
        """Density |f|^2 in the form :meth:`convolve_potential` takes."""

    @abstractmethod
    def convolve(self, rho: Potential) -> Potential:
        pass

    @abstractmethod
    def check_density(self, rho: Potential) -> None:
        pass

    @abstractmethod
    def multiply(self, pot: Potential, g: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def potential_matrix(self, pot: Potential) -> np.ndarray:
        pass

    @abstractmethod
    def pair_apply(
        self, f: np.ndarray, g: np.ndarray, h: np.ndarray
    ) -> np.ndarray:
        """(V * (conj(f) g)) h, vectorised over the columns of ``g``."""

    def potential(self, f: np.ndarray, g: np.ndarray) -> Potential:
        """Mean-field potential V * (conj(f) g) of a pair of fields."""
        return self.convolve(self._pair_density(f, g))

    @abstractmethod
    def _pair_density(self, f: np.ndarray, g: np.ndarray) -> Potential:
        pass

    def convolve_potential(self, rho: Potential) -> Potential:
        self.check_density(rho)
        return self.convolve(rho)

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        return complex(self.weight * np.vdot(f, g))

    def norm(self, f: np.ndarray) -> float:
        return float(np.sqrt(self.weight) * np.linalg.norm(f))

    def normalize(self, f: np.ndarray) -> np.ndarray:
        nrm = self.norm(f)
        if nrm == 0:
            raise SpaceError('Cannot normalize the zero field')
        return np.asarray(f, dtype=complex) / nrm

    def conjugate(self, f: np.ndarray) -> np.ndarray:
        """Antilinear conjugation (Jf)_a = conj(f_pi(a))."""
        return np.conj(np.asarray(f)[self.conj_perm])

    def conjugate_matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix of J X J."""
        perm = self.conj_perm
        return np.conj(x[np.ix_(perm, perm)])

    def basis_vector(self, a: int) -> np.ndarray:
        e = np.zeros(self.dim, dtype=complex)
        e[a] = 1.0 / np.sqrt(self.weight)
        return e


def _power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _min_image(points: int) -> np.ndarray:
    # integer offsets, so that offset(M - j) == -offset(j) exactly
    j = np.arange(points)
    return np.where(j <= points // 2, j, j - points)


def _check_even(values: np.ndarray) -> None:
    axes = tuple(range(values.ndim))
    mirrored = np.roll(np.flip(values, axis=axes), 1, axis=axes)
    bad = np.argwhere(values != mirrored)
    if len(bad):
        idx = tuple(int(i) for i in bad[0])
        mirror = tuple(int(-i % values.shape[0]) for i in idx)
        raise SpaceError(
            'Tabulated kernel is not even: V%s = %r differs from V%s = %r'
            % (
                list(idx),
                float(values[idx]),
                list(mirror),
                float(values[mirror]),
            )
        )


class GridSpace(SingleParticleSpace):
    kind = SpaceKind.GRID.value

    def __init__(
        self, d: int, points: int, length: float, kernel: np.ndarray
    ) -> None:
        self.d = d
        self.points = points
        self.length = float(length)
        self.h = self.length / points
        self.weight = self.h ** d
        self.shape = (points,) * d
        self.dim = points ** d
        self.conj_perm = np.arange(self.dim)
        self._axes = tuple(range(d))

        wavenumbers = 2 * np.pi * np.fft.fftfreq(points, d=1.0 / points)
        wavenumbers = wavenumbers / self.length
        grids = np.meshgrid(*([wavenumbers] * d), indexing='ij')
        self.k2: np.ndarray = sum(q ** 2 for q in grids)

        kernel = np.asarray(kernel, dtype=float)
        if kernel.shape != self.shape:
            raise SpaceError(
                'Kernel samples of shape %s do not match the grid %s'
                % (kernel.shape, self.shape)
            )
        self.kernel = kernel
        self._kernel_hat = fft.fftn(kernel) * self.weight

    @property
    def positions(self) -> np.ndarray:
        """Node coordinates x_j = j h along one axis."""
        return np.arange(self.points) * self.h

    @cached_property
    def _kinetic(self) -> np.ndarray:
        k = self.apply_kinetic(np.eye(self.dim, dtype=complex))
        return 0.5 * (k + k.conj().T)

    @property
    def kinetic(self) -> np.ndarray:
        return self._kinetic

    def _grid(self, f: np.ndarray) -> np.ndarray:
        return np.reshape(f, self.shape + f.shape[1:])

    def _spectral(self, multiplier: np.ndarray, f: np.ndarray) -> np.ndarray:
        g = self._grid(np.asarray(f))
        mult = multiplier.reshape(multiplier.shape + (1,) * (f.ndim - 1))
        out = fft.ifftn(mult * fft.fftn(g, axes=self._axes), axes=self._axes)
        return out.reshape(f.shape)

    def apply_kinetic(self, f: np.ndarray) -> np.ndarray:
        return self._spectral(self.k2, f)

    def kinetic_phase(self, f: np.ndarray, tau: float) -> np.ndarray:
        """exp(-i tau K) f, exact in Fourier space."""
        return self._spectral(np.exp(-1j * tau * self.k2), f)

    def density(self, f: np.ndarray) -> Potential:
        return np.abs(f) ** 2

    def _pair_density(self, f: np.ndarray, g: np.ndarray) -> Potential:
        f = np.conj(f)
        if g.ndim > 1:
            f = f[:, None]
        return f * g

    def convolve(self, rho: Potential) -> Potential:
        rho = np.asarray(rho)
        out = self._spectral(self._kernel_hat, rho)
        if not np.iscomplexobj(rho):
            return out.real
        return out

    def check_density(self, rho: Potential) -> None:
        rho = np.asarray(rho)
        if not np.iscomplexobj(rho):
            return
        scale = max(1.0, float(np.max(np.abs(rho))))
        imag = float(np.max(np.abs(rho.imag)))
        if imag > DENSITY_TOLERANCE * scale:
            raise SpaceError(
                'Density has imaginary part %.3e, expected a real density'
                % imag
            )

    def convolve_potential(self, rho: Potential) -> Potential:
        self.check_density(rho)
        return self.convolve(np.real(rho))

    def multiply(self, pot: Potential, g: np.ndarray) -> np.ndarray:
        if g.ndim > 1:
            return pot[:, None] * g
        return pot * g

    def potential_matrix(self, pot: Potential) -> np.ndarray:
        return np.diag(pot).astype(complex)

    def pair_apply(
        self, f: np.ndarray, g: np.ndarray, h: np.ndarray
    ) -> np.ndarray:
        return self.multiply(h, self.convolve(self._pair_density(f, g)))


class ModeSpace(SingleParticleSpace):
    weight = 1.0

    def __init__(
        self,
        kind: str,
        kinetic: np.ndarray,
        interaction: np.ndarray,
        conj_perm: Sequence[int],
        labels: Optional[Sequence[Union[int, str]]] = None,
        length: Optional[float] = None,
    ) -> None:
        kinetic = np.asarray(kinetic, dtype=complex)
        interaction = np.asarray(interaction, dtype=complex)
        m = kinetic.shape[0]
        if kinetic.shape != (m, m):
            raise SpaceError('Kinetic matrix must be square')
        if interaction.shape != (m,) * 4:
            raise SpaceError(
                'Interaction tensor of shape %s, expected %s'
                % (interaction.shape, (m,) * 4)
            )
        perm = np.asarray(conj_perm, dtype=int)
        if perm.shape != (m,) or sorted(perm.tolist()) != list(range(m)):
            raise SpaceError('conj_perm must be a permutation of 0..%d' % m)
        if not np.array_equal(perm[perm], np.arange(m)):
            raise SpaceError('conj_perm must be an involution')

        scale = max(1.0, float(np.max(np.abs(kinetic))))
        if np.max(np.abs(kinetic - kinetic.conj().T)) > (
            HERMITIAN_TOLERANCE * scale
        ):
            raise SpaceError('Kinetic matrix is not Hermitian')

        wscale = max(1.0, float(np.max(np.abs(interaction))))
        swap = np.abs(interaction - interaction.transpose(1, 0, 3, 2))
        if np.max(swap) > HERMITIAN_TOLERANCE * wscale:
            raise SpaceError('Interaction violates W_abcd = W_badc')
        adj = np.abs(interaction - interaction.transpose(2, 3, 0, 1).conj())
        if np.max(adj) > HERMITIAN_TOLERANCE * wscale:
            raise SpaceError('Interaction violates W_abcd = conj(W_cdab)')

        self.kind = kind
        self.dim = m
        self._kinetic = kinetic
        self.interaction = interaction
        self.conj_perm = perm
        self.labels = list(labels) if labels is not None else list(range(m))
        self.length = length

    @property
    def kinetic(self) -> np.ndarray:
        return self._kinetic

    def apply_kinetic(self, f: np.ndarray) -> np.ndarray:
        return self._kinetic @ f

    def density(self, f: np.ndarray) -> Potential:
        return np.outer(np.conj(f), f)

    def _pair_density(self, f: np.ndarray, g: np.ndarray) -> Potential:
        return np.outer(np.conj(f), g)

    def convolve(self, rho: Potential) -> Potential:
        return np.einsum('abcd,bd->ac', self.interaction, rho)

    def check_density(self, rho: Potential) -> None:
        rho = np.asarray(rho)
        scale = max(1.0, float(np.max(np.abs(rho))))
        defect = float(np.max(np.abs(rho - rho.conj().T)))
        if defect > DENSITY_TOLERANCE * scale:
            raise SpaceError(
                'Density matrix is not Hermitian (defect %.3e), '
                'expected a real density' % defect
            )

    def multiply(self, pot: Potential, g: np.ndarray) -> np.ndarray:
        return pot @ g

    def potential_matrix(self, pot: Potential) -> np.ndarray:
        return np.asarray(pot, dtype=complex)

    def pair_apply(
        self, f: np.ndarray, g: np.ndarray, h: np.ndarray
    ) -> np.ndarray:
        return np.einsum(
            'abcd,b,c,d...->a...', self.interaction, np.conj(f), h, g
        )

    def pair_kernel(self, phi: np.ndarray) -> np.ndarray:
        """k_ab = sum_cd W_abcd phi_c phi_d (pair creation kernel)."""
        return np.einsum('abcd,c,d->ab', self.interaction, phi, phi)


def fourier_transform(
    kernel: KernelConfig, length: float, q: np.ndarray
) -> np.ndarray:
    """V^(q) = integral of V(x) exp(-2 pi i q x / L) over one period."""
    q = np.asarray(q)
    if kernel.kind == KernelKind.ZERO:
        return np.zeros(q.shape)
    if kernel.kind == KernelKind.GAUSSIAN:
        s = kernel.sigma
        wave = 2 * np.pi * q / length
        z = (length / 2 + 1j * wave * s ** 2) / (s * np.sqrt(2))
        return (
            kernel.v0
            * s
            * np.sqrt(2 * np.pi)
            * np.exp(-((wave * s) ** 2) / 2)
            * erf(z).real
        )
    if kernel.kind == KernelKind.COSINE:
        return np.where(np.abs(q) == kernel.n, kernel.v0 * length / 2, 0.0)
    assert kernel.values is not None
    values = np.asarray(kernel.values, dtype=float)
    qmax = int(np.max(np.abs(q))) if q.size else 0
    if kernel.kind == KernelKind.TABULATED_FOURIER:
        if qmax >= len(values):
            raise SpaceError(
                'Kernel table holds V^(q) for |q| <= %d, |q| = %d is needed'
                % (len(values) - 1, qmax)
            )
        return values[np.abs(q)]
    # tabulated real-space samples
    points = len(values)
    _check_even(values)
    if qmax > points // 2:
        raise SpaceError(
            'Kernel table of %d samples resolves |q| <= %d, '
            '|q| = %d is needed' % (points, points // 2, qmax)
        )
    spectrum = fft.fft(values).real * length / points
    return spectrum[np.mod(q, points)]


def kernel_samples(
    kernel: KernelConfig, d: int, points: int, length: float
) -> np.ndarray:
    offsets = _min_image(points)
    grids = np.meshgrid(*([offsets] * d), indexing='ij')
    h = length / points
    if kernel.kind == KernelKind.ZERO:
        return np.zeros((points,) * d)
    if kernel.kind == KernelKind.GAUSSIAN:
        r2 = sum((s * h) ** 2 for s in grids)
        return kernel.v0 * np.exp(-r2 / (2 * kernel.sigma ** 2))
    if kernel.kind == KernelKind.COSINE:
        return kernel.v0 * sum(
            np.cos(2 * np.pi * kernel.n * s / points) for s in grids
        )
    assert kernel.values is not None
    if kernel.kind == KernelKind.TABULATED_FOURIER:
        if d != 1:
            raise SpaceError('tabulated_fourier kernels are one-dimensional')
        qmax = min(points // 2 - 1, len(kernel.values) - 1)
        qs = np.arange(-qmax, qmax + 1)
        hat = fourier_transform(kernel, length, np.abs(qs))
        phases = np.exp(2j * np.pi * np.outer(offsets, qs) / points)
        return (phases @ hat).real / length
    values = np.asarray(kernel.values, dtype=float)
    if values.size != points ** d:
        raise SpaceError(
            'Kernel table has %d samples, the grid needs %d'
            % (values.size, points ** d)
        )
    values = values.reshape((points,) * d)
    _check_even(values)
    return values


def make_grid_space(
    d: int, points: int, length: float, kernel: KernelConfig
) -> GridSpace:
    if d not in (1, 2, 3):
        raise SpaceError('Grid dimension must be 1, 2 or 3, got %r' % d)
    if points < 4 or not _power_of_two(points):
        raise SpaceError(
            'Grid points per axis must be a power of two >= 4, got %r'
            % points
        )
    if length <= 0:
        raise SpaceError('Box length must be positive, got %r' % length)
    samples = kernel_samples(kernel, d, points, length)
    return GridSpace(d, points, length, samples)


def make_fourier_mode_space(
    length: float, k_max: int, kernel: KernelConfig
) -> ModeSpace:
    if k_max < 1:
        raise SpaceError('k_max must be >= 1, got %r' % k_max)
    if length <= 0:
        raise SpaceError('Box length must be positive, got %r' % length)
    ks = np.arange(-k_max, k_max + 1)
    m = len(ks)
    kinetic = np.diag((2 * np.pi * ks / length) ** 2).astype(complex)
    ka, kb, kc, kd = np.meshgrid(ks, ks, ks, ks, indexing='ij')
    hat = fourier_transform(kernel, length, ks[:, None] - ks[None, :])
    conserving = (ka + kb) == (kc + kd)
    interaction = np.where(conserving, hat[:, None, :, None], 0.0) / length
    conj_perm = m - 1 - np.arange(m)
    return ModeSpace(
        SpaceKind.FOURIER.value,
        kinetic,
        interaction,
        conj_perm,
        labels=ks.tolist(),
        length=length,
    )


def make_two_mode_space(epsilon: float, coupling: float) -> ModeSpace:
    """Modes {1/sqrt(2 pi), cos(x)/sqrt(pi)} with V(x) = g cos(x)."""
    kinetic = np.diag([0.0, epsilon]).astype(complex)
    off = 1 - np.eye(2)
    interaction = 0.5 * coupling * np.einsum('ac,bd->abcd', off, off)
    return ModeSpace(
        SpaceKind.TWO_MODE.value,
        kinetic,
        interaction,
        [0, 1],
        labels=['const', 'cos'],
        length=2 * np.pi,
    )


def make_space(cfg: SpaceConfig) -> SingleParticleSpace:
    if cfg.kind == SpaceKind.GRID:
        return make_grid_space(cfg.d, cfg.points, cfg.length, cfg.kernel)
    if cfg.kind == SpaceKind.FOURIER:
        return make_fourier_mode_space(cfg.length, cfg.k_max, cfg.kernel)
    return make_two_mode_space(cfg.epsilon, cfg.coupling)


def require_modes(space: SingleParticleSpace) -> ModeSpace:
    if not isinstance(space, ModeSpace):
        raise SpaceError(
            'A mode space (fourier or two_mode) is required, got %s'
            % space.kind
        )
    return space


class ObservableKind(str, Enum):
    IDENTITY = 'identity'
    NUMBER = 'number'
    SIGMA_X = 'sigma_x'
    SIGMA_Y = 'sigma_y'
    SIGMA_Z = 'sigma_z'
    COSINE = 'cosine'
    SINE = 'sine'
    KINETIC = 'kinetic'
    MATRIX = 'matrix'


class ObservableConfig(Section):
    kind: ObservableKind = Field(..., description="Вид наблюдаемой")
    label: Optional[str] = Field(None, description="Имя в отчётах")
    mode: int = Field(0, ge=0, description="Мода (number)")
    modes: Tuple[int, int] = Field(
        (0, 1), description="Пара мод (sigma_x, sigma_y, sigma_z)"
    )
    n: int = Field(1, ge=1, description="Гармоника (cosine, sine)")
    scale: float = Field(1.0, description="Множитель")
    shift: float = Field(0.0, description="Сдвиг на кратное единицы")
    re: Optional[List[List[float]]] = Field(
        None, description="Вещественная часть матрицы (matrix)"
    )
    im: Optional[List[List[float]]] = Field(
        None, description="Мнимая часть матрицы (matrix)"
    )


class Observable:
    def __init__(self, matrix: np.ndarray, label: str = '') -> None:
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise SpaceError('Observable %r is not a square matrix' % label)
        scale = max(1.0, float(np.max(np.abs(matrix))))
        defect = float(np.max(np.abs(matrix - matrix.conj().T)))
        if defect > HERMITIAN_TOLERANCE * scale:
            raise SpaceError(
                'Observable %r is not Hermitian (defect %.3e)'
                % (label, defect)
            )
        self.matrix = matrix
        self.label = label

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, f: np.ndarray) -> np.ndarray:
        return self.matrix @ f

    def expectation(self, space: SingleParticleSpace, f: np.ndarray) -> float:
        return space.inner(f, self.apply(f)).real

    def centered(
        self, space: SingleParticleSpace, f: np.ndarray
    ) -> 'Observable':
        shift = self.expectation(space, f)
        return Observable(
            self.matrix - shift * np.eye(self.dim), self.label
        )

    def commutes(self, other: 'Observable') -> bool:
        comm = self.matrix @ other.matrix - other.matrix @ self.matrix
        scale = max(
            1.0,
            float(np.max(np.abs(self.matrix)))
            * float(np.max(np.abs(other.matrix))),
        )
        return float(np.max(np.abs(comm))) <= HERMITIAN_TOLERANCE * scale

    def __repr__(self) -> str:
        return 'Observable(%r, dim=%d)' % (self.label, self.dim)


def _check_mode(space: SingleParticleSpace, mode: int) -> None:
    if not 0 <= mode < space.dim:
        raise SpaceError(
            'Mode index %d out of range 0..%d' % (mode, space.dim - 1)
        )


def _multiplication(
    space: SingleParticleSpace, n: int, sine: bool
) -> np.ndarray:
    if isinstance(space, GridSpace):
        x = space.positions
        profile = np.sin if sine else np.cos
        values = profile(2 * np.pi * n * x / space.length)
        full = np.broadcast_to(
            values.reshape((-1,) + (1,) * (space.d - 1)), space.shape
        )
        return np.diag(full.ravel()).astype(complex)
    if isinstance(space, ModeSpace) and space.kind == SpaceKind.FOURIER:
        ks = np.asarray(space.labels)
        diff = ks[:, None] - ks[None, :]
        if sine:
            return ((diff == n).astype(complex) - (diff == -n)) / 2j
        return 0.5 * ((diff == n) | (diff == -n)).astype(complex)
    raise SpaceError(
        'Multiplication observables need a grid or Fourier space, got %s'
        % space.kind
    )


def make_observable(
    space: SingleParticleSpace, cfg: ObservableConfig
) -> Observable:
    m = space.dim
    kind = ObservableKind(cfg.kind)
    if kind == ObservableKind.IDENTITY:
        matrix = np.eye(m, dtype=complex)
    elif kind == ObservableKind.NUMBER:
        _check_mode(space, cfg.mode)
        matrix = np.zeros((m, m), dtype=complex)
        matrix[cfg.mode, cfg.mode] = 1.0
    elif kind in (
        ObservableKind.SIGMA_X,
        ObservableKind.SIGMA_Y,
        ObservableKind.SIGMA_Z,
    ):
        a, b = cfg.modes
        _check_mode(space, a)
        _check_mode(space, b)
        if a == b:
            raise SpaceError('sigma observables need two distinct modes')
        matrix = np.zeros((m, m), dtype=complex)
        if kind == ObservableKind.SIGMA_X:
            matrix[a, b] = matrix[b, a] = 1.0
        elif kind == ObservableKind.SIGMA_Y:
            matrix[a, b] = -1j
            matrix[b, a] = 1j
        else:
            matrix[a, a] = 1.0
            matrix[b, b] = -1.0
    elif kind == ObservableKind.COSINE:
        matrix = _multiplication(space, cfg.n, sine=False)
    elif kind == ObservableKind.SINE:
        matrix = _multiplication(space, cfg.n, sine=True)
    elif kind == ObservableKind.KINETIC:
        matrix = np.array(space.kinetic, dtype=complex)
    else:
        if cfg.re is None:
            raise SpaceError('matrix observable needs "re" entries')
        matrix = np.asarray(cfg.re, dtype=complex)
        if cfg.im is not None:
            matrix = matrix + 1j * np.asarray(cfg.im, dtype=float)
        if matrix.shape != (m, m):
            raise SpaceError(
                'matrix observable of shape %s, the space needs %s'
                % (matrix.shape, (m, m))
            )
    matrix = cfg.scale * matrix + cfg.shift * np.eye(m)
    return Observable(matrix, cfg.label or kind.value)
