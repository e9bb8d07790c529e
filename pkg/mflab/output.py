import logging
import os
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Union

import numpy as np

from .error import Error
from .misc import atomic_write, format_float, json_encode

logger = logging.getLogger('mflab')


def format_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if value is None:
        return ''
    return str(value)


class Output:
    """Result files of one command.

    Every file is written atomically and carries the config hash.
    """

    def __init__(
        self, directory: Union[str, Path], command: str, config_hash: str
    ) -> None:
        self.directory = Path(directory)
        self.command = command
        self.config_hash = config_hash
        self.written: List[str] = []

    def prepare(self) -> None:
        try:
            os.makedirs(str(self.directory), exist_ok=True)
        except OSError as err:
            raise Error(
                'Cannot create output directory %s: %s'
                % (self.directory, err)
            )

    def path(self, name: str) -> Path:
        return self.directory / name

    @property
    def comment(self) -> str:
        return '# mflab %s config_hash=%s' % (self.command, self.config_hash)

    def csv(
        self,
        name: str,
        columns: Sequence[str],
        rows: Iterable[Sequence[Any]],
    ) -> Path:
        lines = [self.comment, ','.join(columns)]
        for row in rows:
            if len(row) != len(columns):
                raise Error(
                    '%s: row of %d cells for %d columns'
                    % (name, len(row), len(columns))
                )
            lines.append(','.join(format_cell(cell) for cell in row))
        return self.text(name, '\n'.join(lines) + '\n')

    def json(self, name: str, data: Any) -> Path:
        return self.text(
            name, json_encode(data, sort_keys=True, indent=2) + '\n'
        )

    def text(self, name: str, data: str) -> Path:
        path = self.path(name)
        atomic_write(path, data)
        self.written.append(name)
        logger.debug('Written %s', path)
        return path
