__version__ = '0.1.0'

from . import app, error
from .app import BaseApplication
from .cli import main
from .component import Component
from .config import BaseConfig
from .lab import LabConfig, Laboratory
from .logger import Span

__all__ = [
    'app',
    'error',
    'Component',
    'BaseApplication',
    'BaseConfig',
    'LabConfig',
    'Laboratory',
    'Span',
    'main',
]
