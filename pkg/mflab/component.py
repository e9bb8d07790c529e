import asyncio
from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .app import BaseApplication


class Component(object):
    """Application part with a prepare/start/stop lifecycle.

    All components are prepared and started before a command executes
    and stopped in reverse order once it has finished.
    """

    app: 'BaseApplication'
    loop: asyncio.AbstractEventLoop

    async def prepare(self) -> None:
        pass

    async def start(self) -> None:
        raise NotImplementedError()

    async def stop(self) -> None:
        raise NotImplementedError()
