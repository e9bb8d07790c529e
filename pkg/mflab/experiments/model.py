import logging
from functools import cached_property
from typing import TYPE_CHECKING, Dict, List, Sequence

import numpy as np

from ..bogoliubov import BogoliubovSeries, propagate_theta
from ..covariance import CovarianceMatrix, commuting_family, covariance_at
from ..error import StudyError
from ..hartree import HartreeTrajectory, evolve_hartree, initial_state
from ..space import (
    ModeSpace,
    Observable,
    SingleParticleSpace,
    make_observable,
    make_space,
    require_modes,
)

if TYPE_CHECKING:  # pragma: no cover
    from ..lab import LabConfig

logger = logging.getLogger('mflab')


class Model:
    """Mean-field side of a configuration, solved on first use."""

    def __init__(self, cfg: 'LabConfig') -> None:
        self.cfg = cfg
        self.space: SingleParticleSpace = make_space(cfg.space)
        self.phi0 = initial_state(self.space, cfg.hartree.initial)
        self._families: Dict[str, List[Observable]] = {}

    @property
    def modes(self) -> ModeSpace:
        return require_modes(self.space)

    @cached_property
    def trajectory(self) -> HartreeTrajectory:
        h = self.cfg.hartree
        return evolve_hartree(
            self.space,
            self.phi0,
            h.T,
            h.dt,
            h.method,
            h.renormalize,
            h.norm_tolerance,
        )

    @cached_property
    def series(self) -> BogoliubovSeries:
        b = self.cfg.bogoliubov
        return propagate_theta(
            self.trajectory, b.dt, b.integrator, b.tolerance, b.record_every
        )

    def family(self, name: str) -> List[Observable]:
        if name not in self._families:
            if name not in self.cfg.observables:
                raise StudyError(
                    'Unknown observable family %r, configured: %s'
                    % (name, sorted(self.cfg.observables))
                )
            self._families[name] = [
                make_observable(self.space, o)
                for o in self.cfg.observables[name]
            ]
        return self._families[name]

    def is_commuting(self, name: str) -> bool:
        return commuting_family(self.family(name))

    def check_times(self, times: Sequence[float]) -> None:
        T = self.cfg.hartree.T
        late = [t for t in times if t > T * (1 + 1e-12)]
        if late:
            raise StudyError(
                'Times %s lie beyond the solved range hartree.T=%g'
                % (late, T)
            )

    def phi_at(self, t: float) -> np.ndarray:
        return self.trajectory.at(t)

    def covariance(self, name: str, t: float) -> CovarianceMatrix:
        pair = self.series.pair_at(t)
        return covariance_at(
            pair, self.phi_at(t), self.family(name), self.is_commuting(name)
        )
