import asyncio
from contextvars import Token
from functools import wraps
from types import TracebackType
from typing import TYPE_CHECKING, Any, Callable, Optional, Type

import mflab.misc

from .logger import Logger
from .span import Span

if TYPE_CHECKING:  # pragma: no cover
    from mflab.app import BaseApplication


def wrap2span(
    *,
    name: Optional[str] = None,
    kind: Optional[str] = None,
    cls: Type[Span] = Span,
    ignore_ctx: bool = False,
    app: Optional['BaseApplication'] = None,
) -> '_Wrapper':
    return _Wrapper(name, kind, cls, ignore_ctx, app)


class _Wrapper:
    """Span around a call.

    Works for both plain and coroutine functions. Outside of a running
    application (e.g. inside a pool worker process) the call is made
    without a span.
    """

    def __init__(
        self,
        name: Optional[str] = None,
        kind: Optional[str] = None,
        cls: Type[Span] = Span,
        ignore_ctx: bool = False,
        app: Optional['BaseApplication'] = None,
    ) -> None:
        self.name = name
        self.kind = kind
        self.cls = cls
        self.ignore_ctx = ignore_ctx
        self.app = app
        self.span: Optional[Span] = None
        self._app_token: Optional[Token] = None

    def _new_span(self) -> Optional[Span]:
        span = mflab.misc.ctx_span_get()
        if span is not None and not self.ignore_ctx:
            return span.new_child(self.name, self.kind, cls=self.cls)
        if self.app is None:
            app = mflab.misc.ctx_app_get()
        else:
            app = self.app
            self._app_token = mflab.misc.ctx_app_set(app)
        if app is None or not app.logger.started:
            return None
        return app.logger.span_new(self.name, self.kind, cls=self.cls)

    def _reset_app(self) -> None:
        if self._app_token is not None:
            mflab.misc.ctx_app_reset(self._app_token)
            self._app_token = None

    def __call__(self, func: Callable) -> Callable:
        if asyncio.iscoroutinefunction(func):

            @wraps(func)
            async def async_wrapper(*args: Any, **kwargs: Any) -> Any:
                new_span = self._new_span()
                if new_span is None:
                    return await func(*args, **kwargs)
                with new_span:
                    try:
                        return await func(*args, **kwargs)
                    finally:
                        self._reset_app()

            return async_wrapper

        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            new_span = self._new_span()
            if new_span is None:
                return func(*args, **kwargs)
            with new_span:
                try:
                    return func(*args, **kwargs)
                finally:
                    self._reset_app()

        return wrapper

    def __enter__(self) -> Optional[Span]:
        self.span = self._new_span()
        if self.span is not None:
            self.span.__enter__()
        return self.span

    def __exit__(
        self,
        exc_type: Optional[Type[BaseException]],
        exc_value: Optional[BaseException],
        traceback: Optional[TracebackType],
    ) -> None:
        if self.span is not None:
            self.span.__exit__(exc_type, exc_value, traceback)
            self.span = None
        self._reset_app()


__all__ = [
    "Span",
    "wrap2span",
    "Logger",
]
