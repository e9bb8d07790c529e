from contextvars import ContextVar
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:  # pragma: no cover
    from .app import BaseApplication
    from .logger.span import Span

app: ContextVar[Optional['BaseApplication']] = ContextVar('app', default=None)
span: ContextVar[Optional['Span']] = ContextVar('span', default=None)
