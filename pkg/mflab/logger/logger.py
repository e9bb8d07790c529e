import asyncio
from typing import TYPE_CHECKING, Any, Coroutine, Dict, List, Optional, Type

from .adapters import ADAPTER_PROMETHEUS, ADAPTER_SENTRY, AbcAdapter
from .span import Span

if TYPE_CHECKING:  # pragma: no cover
    from mflab.app import BaseApplication


class Logger:
    """Collects finished spans of an application and feeds the adapters."""

    ADAPTER_PROMETHEUS = ADAPTER_PROMETHEUS
    ADAPTER_SENTRY = ADAPTER_SENTRY

    def __init__(self, app: 'BaseApplication') -> None:
        self.app = app
        self.adapters: Dict[str, AbcAdapter] = {}
        self._pending: List[Coroutine[Any, Any, None]] = []
        self._open_spans = 0
        self._started = False

    @property
    def started(self) -> bool:
        return self._started

    async def start(self) -> None:
        self._started = True
        await asyncio.gather(*self._pending)
        self._pending = []

    async def stop(self) -> None:
        if not self._started:  # pragma: no cover
            raise UserWarning
        if self._open_spans > 0:
            self.app.log_warn(
                'Logger stopped with %d unfinished span(s)', self._open_spans
            )
        await asyncio.gather(
            *[adapter.stop() for adapter in self.adapters.values()]
        )
        self._started = False

    def add(self, adapter: AbcAdapter) -> AbcAdapter:
        if self._started:  # pragma: no cover
            raise UserWarning
        if not isinstance(adapter, AbcAdapter):
            raise UserWarning('Invalid adapter')
        self._pending.append(adapter.start(self))
        self.adapters[adapter.name] = adapter
        return adapter

    def span_new(
        self,
        name: Optional[str] = None,
        kind: Optional[str] = None,
        cls: Type[Span] = Span,
    ) -> Span:
        return cls.new(name=name, kind=kind, app=self.app)

    def span_started(self, span: Span) -> None:
        self._open_spans += 1

    def span_finished(self, span: Span) -> None:
        self._open_spans -= 1

    def handle_span(self, span: Span) -> None:
        for adapter in self.adapters.values():
            try:
                adapter.handle(span)
            except Exception as err:  # pragma: no cover
                self.app.log_err(err)
