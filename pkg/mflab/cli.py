import argparse
import logging
import os
import sys
from typing import Any, Dict, List, NamedTuple, Optional

from .app import EXIT_ERROR, EXIT_OK
from .config import BaseConfig
from .error import ConfigurationError, Error
from .experiments import COMMANDS
from .lab import LabConfig, Laboratory
from .misc import dict_merge
from .pool import ENV_WORKERS, resolve_workers

logger = logging.getLogger('mflab')


class Args(NamedTuple):
    version: bool
    command: Optional[str]
    config: List[str]
    out: str
    workers: Optional[int]
    verbose: bool
    show_config: Optional[str]
    emit_resolved_config: bool
    log_level: str
    log_file: Optional[str]


def _parse_argv(prog: str, options: list) -> Args:
    parser = argparse.ArgumentParser(
        prog=prog,
        description='Mean-field bosons: Hartree flow, Bogoliubov '
        'fluctuations and exact many-body checks',
    )

    parser.add_argument(
        'command',
        nargs='?',
        choices=list(COMMANDS),
        help='Solver or study to run',
    )

    parser.add_argument(
        '-c',
        '--config',
        dest='config',
        action='append',
        default=[],
        type=str,
        help='Path to configuration file in YAML format; may be repeated, '
        'later files override earlier ones',
    )

    parser.add_argument(
        '-o',
        '--out',
        dest='out',
        default='.',
        type=str,
        help='Output directory (created if missing)',
    )

    parser.add_argument(
        '-w',
        '--workers',
        dest='workers',
        type=int,
        help='Worker processes (default $%s or the number of cores)'
        % ENV_WORKERS,
    )

    parser.add_argument(
        '--verbose',
        action="store_true",
        default=False,
        help='Debug logging',
    )

    parser.add_argument(
        '--show-config',
        dest='show_config',
        type=str,
        choices=['json', 'yaml', 'jsonschema'],
        help='Show resolved configuration and exit',
    )

    parser.add_argument(
        '--emit-resolved-config',
        dest='emit_resolved_config',
        action="store_true",
        default=False,
        help='Write resolved-config.yaml into the output directory',
    )

    parser.add_argument(
        '-V',
        '--version',
        action="store_true",
        default=False,
        help="output version information and exit",
    )

    parser.add_argument(
        '--log-level',
        dest='log_level',
        type=str,
        default='INFO',
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
        help='Logging level',
    )

    parser.add_argument(
        '--log-file',
        dest='log_file',
        type=str,
        help='Logging file name',
    )
    parsed = parser.parse_args(args=options)
    if not parsed.version and not parsed.show_config and not parsed.command:
        parser.error('the command is required')
    return Args(
        version=parsed.version,
        command=parsed.command,
        config=parsed.config,
        out=parsed.out,
        workers=parsed.workers,
        verbose=parsed.verbose,
        show_config=parsed.show_config,
        emit_resolved_config=parsed.emit_resolved_config,
        log_level=parsed.log_level,
        log_file=parsed.log_file,
    )


def _setup_logging(options: Args) -> None:
    level = 'DEBUG' if options.verbose else options.log_level
    config: Dict[str, Any] = dict(level=getattr(logging, level))
    if options.log_file:
        config["filename"] = options.log_file
    logging.basicConfig(**config)


def _load_document(path: str) -> Dict[str, Any]:
    if not os.path.isfile(path):
        raise ConfigurationError('Configuration file %s not found' % path)
    lcfg = path.lower()
    if lcfg.endswith('.yml') or lcfg.endswith('.yaml'):
        data = LabConfig.load_yaml(path)
    elif lcfg.endswith('.json'):
        data = LabConfig.load_json(path)
    else:
        raise ConfigurationError(
            'Extension of configuration file %s must be one of: '
            '.yml, .yaml, .json' % path
        )
    if not isinstance(data, dict):
        raise ConfigurationError('%s: top level must be a mapping' % path)
    return data


def load_config(options: Args) -> LabConfig:
    documents = [_load_document(path) for path in options.config]
    return LabConfig.from_dict(dict_merge(*documents))


def _show_config(options: Args, cfg: BaseConfig) -> None:
    if options.show_config == 'json':
        cfg.to_json(sys.stdout)
    elif options.show_config == 'yaml':
        cfg.to_yaml(sys.stdout)
    elif options.show_config == 'jsonschema':
        cfg.to_jsonschema(sys.stdout)
    else:  # pragma: no cover
        raise UserWarning


def main(argv: List[str], version: str) -> int:
    try:
        prog, args = argv[0], argv[1:]
        options = _parse_argv(prog, args)
        if options.version:
            print(version)
            return EXIT_OK
        _setup_logging(options)
        try:
            cfg = load_config(options)
            if options.show_config:
                _show_config(options, cfg)
                return EXIT_OK
            assert options.command is not None
            app = Laboratory(
                cfg,
                options.command,
                out=options.out,
                workers=resolve_workers(options.workers),
                emit_resolved_config=options.emit_resolved_config,
            )
        except Error as err:
            logger.error('%s: %s', err.__class__.__name__, err)
            return EXIT_ERROR
        app._version = version
        return app.run()
    except KeyboardInterrupt:  # pragma: no cover
        return EXIT_ERROR
