import asyncio
import os
from concurrent.futures import Executor, ProcessPoolExecutor
from typing import Any, Callable, Iterable, List, Optional

from .component import Component
from .error import PrepareError

ENV_WORKERS = 'MFLAB_WORKERS'


def resolve_workers(workers: Optional[int] = None) -> int:
    """--workers, then $MFLAB_WORKERS, then the number of cores."""
    if workers is None:
        env = os.environ.get(ENV_WORKERS)
        if env:
            try:
                workers = int(env)
            except ValueError:
                raise PrepareError(
                    '%s must be an integer, got %r' % (ENV_WORKERS, env)
                )
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise PrepareError('Worker count must be positive, got %d' % workers)
    return workers


class WorkerPool(Component):
    """Process pool for independent study tasks.

    Results of :meth:`map` come back in input order whatever the pool
    size, so reductions over them are deterministic. With a single
    worker (or before :meth:`start`) tasks run in the calling process.
    """

    def __init__(self, workers: int = 1) -> None:
        if workers < 1:
            raise PrepareError(
                'Worker count must be positive, got %d' % workers
            )
        self.workers = workers
        self._executor: Optional[Executor] = None

    async def start(self) -> None:
        if self.workers > 1:
            self._executor = ProcessPoolExecutor(max_workers=self.workers)

    async def stop(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    async def map(self, fn: Callable, items: Iterable[Any]) -> List[Any]:
        items = list(items)
        if self._executor is None or len(items) < 2:
            return [fn(item) for item in items]
        loop = asyncio.get_event_loop()
        return list(
            await asyncio.gather(
                *[
                    loop.run_in_executor(self._executor, fn, item)
                    for item in items
                ]
            )
        )
