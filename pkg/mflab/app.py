import asyncio
import logging
from typing import Any, Dict, List, Union

from .component import Component
from .config import BaseConfig
from .error import Error
from .logger import Logger
from .misc import ctx_app_set

logger = logging.getLogger('mflab')

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_THRESHOLD = 2


class BaseApplication(object):
    """Event loop owner: starts the components, runs one command.

    Components start in the order they were added and stop in reverse.
    """

    def __init__(self, cfg: BaseConfig) -> None:
        try:
            self.loop = asyncio.get_running_loop()
        except RuntimeError:
            self.loop = asyncio.new_event_loop()
            asyncio.set_event_loop(self.loop)
        ctx_app_set(self)
        self.cfg = cfg
        self.logger: Logger = Logger(self)
        self._components: Dict[str, Component] = {}
        self._started: List[str] = []
        self._version = ''

    @property
    def version(self) -> str:
        return self._version

    def add(self, name: str, comp: Component) -> None:
        if not isinstance(comp, Component):
            raise UserWarning('%r is not a component' % comp)
        if name in self._components:
            raise UserWarning('Component %s already added' % name)
        comp.loop = self.loop
        comp.app = self
        self._components[name] = comp

    def log_err(
        self, err: Union[str, BaseException], *args: Any, **kwargs: Any
    ) -> None:
        if not err:
            return
        if isinstance(err, Error):
            logger.error('%s: %s', err.__class__.__name__, err)
        elif isinstance(err, BaseException):
            logger.exception(err, *args, **kwargs)
        else:
            logger.error(err, *args, **kwargs)

    def log_warn(self, warn: str, *args: Any, **kwargs: Any) -> None:
        logger.warning(warn, *args, **kwargs)

    def log_info(self, info: str, *args: Any, **kwargs: Any) -> None:
        logger.info(info, *args, **kwargs)

    def log_debug(self, debug: str, *args: Any, **kwargs: Any) -> None:
        logger.debug(debug, *args, **kwargs)

    async def execute(self) -> int:
        raise NotImplementedError()

    def run(self) -> int:
        """Start, execute and stop; the exit status of the command."""
        try:
            self.loop.run_until_complete(self.start())
            return self.loop.run_until_complete(self.execute())
        except Error as err:
            self.log_err(err)
            return EXIT_ERROR
        except KeyboardInterrupt:  # pragma: no cover
            return EXIT_ERROR
        finally:
            try:
                self.loop.run_until_complete(self.stop())
                self.loop.run_until_complete(self.loop.shutdown_asyncgens())
            finally:
                self.loop.close()

    async def start(self) -> None:
        ctx_app_set(self)
        self.log_debug('Configuring logger')
        await self.logger.start()

        self.log_debug('Prepare for start')
        for comp in self._components.values():
            await comp.prepare()

        for name, comp in self._components.items():
            self.log_debug('Starting %s', name)
            await comp.start()
            self._started.append(name)

    async def stop(self) -> None:
        self.log_debug('Shutting down...')
        while self._started:
            name = self._started.pop()
            self.log_debug('Stopping %s', name)
            await self._components[name].stop()
        if self.logger.started:
            self.log_debug('Shutting down span logger')
            await self.logger.stop()
