import math
from itertools import combinations
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from ..error import FockError

# largest code kept in int64 with room for the sort key
_CODE_LIMIT = 2 ** 62


def sector_dimension(modes: int, particles: int) -> int:
    return math.comb(particles + modes - 1, modes - 1)


def truncated_dimension(modes: int, n_max: int) -> int:
    return sum(sector_dimension(modes, n) for n in range(n_max + 1))


def sector_occupations(modes: int, particles: int) -> np.ndarray:
    """All occupations with the given total, descending lexicographic.

    |N, 0, ..., 0> comes first and |0, ..., 0, N> last.
    """
    if modes == 1:
        return np.array([[particles]], dtype=np.int64)
    slots = particles + modes - 1
    bars = np.array(
        list(combinations(range(slots), modes - 1)), dtype=np.int64
    )
    if bars.size == 0:
        bars = np.zeros((1, 0), dtype=np.int64)
    edges = np.hstack(
        [
            np.full((len(bars), 1), -1, dtype=np.int64),
            bars,
            np.full((len(bars), 1), slots, dtype=np.int64),
        ]
    )
    occ = np.diff(edges, axis=1) - 1
    order = np.lexsort(tuple(-occ[:, j] for j in reversed(range(modes))))
    return occ[order]


class OccupationBasis:
    """Occupation-number basis of a fixed-N sector or a truncated space.

    The truncated basis is the concatenation of sectors n = 0..n_max,
    each in the order of :func:`sector_occupations`.
    """

    def __init__(
        self,
        modes: int,
        particles: Optional[int] = None,
        n_max: Optional[int] = None,
    ) -> None:
        if modes < 1:
            raise FockError('Need at least one mode, got %r' % modes)
        if (particles is None) == (n_max is None):
            raise FockError('Give exactly one of particles and n_max')
        self.modes = modes
        self.particles = particles
        self.n_max = n_max
        if particles is not None:
            if particles < 0:
                raise FockError('Particle number must be >= 0')
            self.occupations = sector_occupations(modes, particles)
            self._sectors = {particles: slice(0, len(self.occupations))}
            cap = particles
        else:
            assert n_max is not None
            if n_max < 0:
                raise FockError('n_max must be >= 0')
            blocks = []
            self._sectors = {}
            start = 0
            for n in range(n_max + 1):
                block = sector_occupations(modes, n)
                self._sectors[n] = slice(start, start + len(block))
                start += len(block)
                blocks.append(block)
            self.occupations = np.vstack(blocks)
            cap = n_max
        self.occupations.setflags(write=False)
        self.totals = self.occupations.sum(axis=1)
        self.dim = len(self.occupations)

        self._radix = cap + 1
        self._use_codes = float(self._radix) ** modes < _CODE_LIMIT
        if self._use_codes:
            codes = self.encode(self.occupations)
            self._order = np.argsort(codes, kind='stable')
            self._sorted_codes = codes[self._order]
        else:
            self._lookup: Dict[Tuple[int, ...], int] = {
                tuple(int(x) for x in row): i
                for i, row in enumerate(self.occupations)
            }

    @classmethod
    def fixed(cls, modes: int, particles: int) -> 'OccupationBasis':
        return cls(modes, particles=particles)

    @classmethod
    def truncated(cls, modes: int, n_max: int) -> 'OccupationBasis':
        return cls(modes, n_max=n_max)

    @property
    def is_fixed(self) -> bool:
        return self.particles is not None

    def sector(self, n: int) -> slice:
        if n not in self._sectors:
            raise FockError('Sector n=%d is not part of the basis' % n)
        return self._sectors[n]

    def encode(self, occupations: np.ndarray) -> np.ndarray:
        occ = np.asarray(occupations, dtype=np.int64)
        powers = self._radix ** np.arange(
            self.modes - 1, -1, -1, dtype=np.int64
        )
        return occ @ powers

    def indices(self, occupations: np.ndarray) -> np.ndarray:
        """Basis index of every row, -1 where the row is not in the basis."""
        occ = np.atleast_2d(np.asarray(occupations, dtype=np.int64))
        valid = np.all(occ >= 0, axis=1) & np.all(occ < self._radix, axis=1)
        out = np.full(len(occ), -1, dtype=np.int64)
        if self.is_fixed:
            valid &= occ.sum(axis=1) == self.particles
        if not np.any(valid):
            return out
        if self._use_codes:
            codes = self.encode(occ[valid])
            pos = np.searchsorted(self._sorted_codes, codes)
            pos = np.minimum(pos, len(self._sorted_codes) - 1)
            hit = self._sorted_codes[pos] == codes
            found = np.where(hit, self._order[pos], -1)
            out[np.flatnonzero(valid)] = found
        else:
            for i in np.flatnonzero(valid):
                key = tuple(int(x) for x in occ[i])
                out[i] = self._lookup.get(key, -1)
        return out

    def index(self, occupation: Iterable[int]) -> int:
        i = int(self.indices(np.array([list(occupation)]))[0])
        if i < 0:
            raise FockError(
                'Occupation %s is not in the basis' % list(occupation)
            )
        return i

    def state(self, occupation: Iterable[int]) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.index(occupation)] = 1.0
        return psi

    def vacuum(self) -> np.ndarray:
        return self.state([0] * self.modes)

    def __repr__(self) -> str:
        if self.is_fixed:
            spec = 'N=%d' % self.particles
        else:
            spec = 'n_max=%d' % self.n_max
        return 'OccupationBasis(m=%d, %s, dim=%d)' % (
            self.modes,
            spec,
            self.dim,
        )
