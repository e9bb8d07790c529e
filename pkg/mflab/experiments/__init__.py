from typing import Awaitable, Callable, Dict

from .berry_esseen import berry_esseen_command
from .clt import clt_command, product_oracle_grid, product_oracle_t0
from .config import StudyConfig, ThresholdConfig
from .crosscheck import crosscheck_command
from .density import density_command
from .fit import RateFit, fit_rate, self_convergence_order
from .fluctuation import fluctuation_command
from .model import Model
from .report import Criterion, Report
from .solvers import bogoliubov_command, covariance_command, hartree_command
from .xi import xi_command

Command = Callable[..., Awaitable[Report]]

COMMANDS: Dict[str, Command] = {
    'hartree': hartree_command,
    'bogoliubov': bogoliubov_command,
    'covariance': covariance_command,
    'clt': clt_command,
    'berry-esseen': berry_esseen_command,
    'density-rate': density_command,
    'fluctuation': fluctuation_command,
    'crosscheck': crosscheck_command,
    'xi': xi_command,
}

__all__ = [
    "COMMANDS",
    "Criterion",
    "Model",
    "RateFit",
    "Report",
    "StudyConfig",
    "ThresholdConfig",
    "fit_rate",
    "product_oracle_grid",
    "product_oracle_t0",
    "self_convergence_order",
]
