import itertools
import time
import traceback
from contextvars import Token
from types import TracebackType
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Type

import mflab.misc as misc

if TYPE_CHECKING:  # pragma: no cover
    from mflab.app import BaseApplication

    from .logger import Logger

_span_ids = itertools.count(1)


class Span:
    """Timed section of a run.

    A span is handed to the logger adapters once its root span has
    finished, children first, so a whole solve is reported together.
    """

    KIND_STUDY = 'STUDY'
    KIND_SOLVER = 'SOLVER'

    TAG_ERROR = 'error'
    TAG_ERROR_CLASS = 'error.class'
    TAG_ERROR_MESSAGE = 'error.message'

    def __init__(
        self,
        logger: Optional['Logger'],
        name: str = '',
        kind: Optional[str] = None,
        parent: Optional['Span'] = None,
    ) -> None:
        self.logger = logger
        self.id = '%016x' % next(_span_ids)
        self.name = name
        self.kind = kind
        self.parent = parent
        self.children: List['Span'] = []
        self.tags: Dict[str, str] = {}
        self.traceback: Optional[str] = None
        self.start_stamp: Optional[float] = None
        self.finish_stamp: Optional[float] = None
        self.skipped = False
        self.handled = False
        self._exception: Optional[BaseException] = None
        self._ctx_token: Optional[Token] = None

    @classmethod
    def new(
        cls,
        name: Optional[str] = None,
        kind: Optional[str] = None,
        app: Optional['BaseApplication'] = None,
    ) -> 'Span':
        if app is None:
            app = misc.ctx_app_get()
            if app is None:  # pragma: no cover
                raise UserWarning
        return cls(app.logger, name or '', kind)

    def new_child(
        self,
        name: Optional[str] = None,
        kind: Optional[str] = None,
        cls: Optional[Type['Span']] = None,
    ) -> 'Span':
        span = (cls or Span)(self.logger, name or '', kind, parent=self)
        if self.skipped:
            span.skip()
        self.children.append(span)
        return span

    def skip(self) -> 'Span':
        """Keep this span and its children away from the adapters."""
        self.skipped = True
        for child in self.children:
            child.skip()
        return self

    def tag(self, name: str, value: Any) -> 'Span':
        self.tags[name] = str(value)
        return self

    def error(self, err: BaseException) -> 'Span':
        self.tag(self.TAG_ERROR, 'true')
        self.tag(self.TAG_ERROR_CLASS, type(err).__name__)
        self.tag(self.TAG_ERROR_MESSAGE, str(err))
        self._exception = err
        if err.__traceback__ is not None:
            self.traceback = ''.join(traceback.format_tb(err.__traceback__))
        return self

    def get_error(self) -> Optional[BaseException]:
        return self._exception

    @property
    def duration(self) -> float:
        if self.start_stamp is None:
            return 0.0
        end = self.finish_stamp
        if end is None:
            end = time.perf_counter()
        return end - self.start_stamp

    def start(self) -> 'Span':
        self.start_stamp = time.perf_counter()
        if self.logger is not None:
            self.logger.span_started(self)
        return self

    def finish(self, exception: Optional[BaseException] = None) -> 'Span':
        self.finish_stamp = time.perf_counter()
        if exception is not None:
            self.error(exception)
        if self.parent is None or self.parent.handled:
            self._hand_over(self)
        if self.logger is not None:
            self.logger.span_finished(self)
        return self

    def _hand_over(self, span: 'Span') -> None:
        for child in span.children:
            if child.finish_stamp is not None and not child.handled:
                self._hand_over(child)
        if not span.skipped and self.logger is not None:
            self.logger.handle_span(span)
        span.handled = True

    def __enter__(self) -> 'Span':
        self.start()
        self._ctx_token = misc.ctx_span_set(self)
        return self

    def __exit__(
        self,
        exc_type: Optional[Type[BaseException]],
        exc_value: Optional[BaseException],
        tb: Optional[TracebackType],
    ) -> None:
        self.finish(exception=exc_value)
        if self._ctx_token is not None:
            misc.ctx_span_reset(self._ctx_token)
            self._ctx_token = None

    def __str__(self) -> str:
        if self.start_stamp is None:
            return 'Span[%s]' % self.name
        return 'Span[%s] in %.02f ms' % (self.name, self.duration * 1000)
