import os
from typing import Any, Callable, Dict

import numpy as np
import pytest

from mflab.lab import LabConfig
from mflab.misc import dict_merge
from mflab.space import ModeSpace, make_two_mode_space

CONFIGS = os.path.join(os.path.dirname(__file__), '..', 'configs')
PHI0 = np.array([0.8, 0.6], dtype=complex)


@pytest.fixture
def two_mode() -> ModeSpace:
    return make_two_mode_space(1.0, 1.0)


@pytest.fixture
def free_two_mode() -> ModeSpace:
    return make_two_mode_space(1.0, 0.0)


@pytest.fixture
def phi0() -> np.ndarray:
    return PHI0.copy()


@pytest.fixture
def lab_config() -> Callable[..., LabConfig]:
    """LabConfig of the default model with a short Hartree run."""

    def factory(**overrides: Dict[str, Any]) -> LabConfig:
        base: Dict[str, Any] = {
            'hartree': {'T': 0.5, 'dt': 0.005},
            'study': {'times': [0.0, 0.5]},
        }
        return LabConfig.from_dict(dict_merge(base, overrides))

    return factory


@pytest.fixture
def shipped_config() -> Callable[..., LabConfig]:
    """LabConfig merged from files under configs/ as the CLI merges them."""

    def factory(*names: str, **overrides: Dict[str, Any]) -> LabConfig:
        documents = [
            LabConfig.load_yaml(os.path.join(CONFIGS, name)) for name in names
        ]
        return LabConfig.from_dict(dict_merge(*documents, overrides))

    return factory
