from ._abc import AbcAdapter, AbcConfig, AdapterConfigurationError
from .prometheus import PrometheusAdapter
from .sentry import SentryAdapter

ADAPTER_PROMETHEUS = PrometheusAdapter.__name__
ADAPTER_SENTRY = SentryAdapter.__name__

__all__ = [
    "AdapterConfigurationError",
    "AbcAdapter",
    "AbcConfig",
]
