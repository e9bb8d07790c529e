from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Optional

from pydantic import Field

from ...config import Section
from ...error import ConfigurationError
from ..span import Span

if TYPE_CHECKING:  # pragma: no cover
    from ..logger import Logger


class AdapterConfigurationError(ConfigurationError):
    pass


class AbcConfig(Section):
    enabled: bool = Field(False, description="Включение адаптера")


class AbcAdapter(ABC):
    cfg: Optional[AbcConfig] = None

    @abstractmethod
    async def start(self, logger: 'Logger') -> None:
        pass

    @abstractmethod
    def handle(self, span: Span) -> None:
        pass

    @abstractmethod
    async def stop(self) -> None:
        pass

    @property
    def name(self) -> str:
        return self.__class__.__name__


__all__ = [
    "AbcConfig",
    "AbcAdapter",
]
