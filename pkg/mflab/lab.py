"""The laboratory application: configuration and command dispatch."""
import logging
import os
from typing import Any, Dict, List, Optional

from pydantic import Field, validator

from .app import EXIT_OK, EXIT_THRESHOLD, BaseApplication
from .bogoliubov import BogoliubovConfig
from .config import BaseConfig, Section
from .error import ConfigurationError
from .experiments import COMMANDS
from .experiments.config import StudyConfig
from .experiments.report import Report
from .hartree import HartreeConfig
from .logger import Span, wrap2span
from .logger.adapters.prometheus import PrometheusAdapter, PrometheusConfig
from .logger.adapters.sentry import SentryAdapter, SentryConfig
from .misc import ctx_span_get
from .output import Output
from .pool import WorkerPool
from .space import ObservableConfig, ObservableKind, SpaceConfig
from .xi import XiConfig

logger = logging.getLogger('mflab')

RESOLVED_CONFIG = 'resolved-config.yaml'
METRICS_FILE = 'metrics.prom'


def _default_observables() -> Dict[str, List[ObservableConfig]]:
    return {
        'commuting': [
            ObservableConfig(kind=ObservableKind.SIGMA_Z),
            ObservableConfig(kind=ObservableKind.NUMBER, mode=0),
        ],
        'noncommuting': [
            ObservableConfig(kind=ObservableKind.SIGMA_X),
            ObservableConfig(kind=ObservableKind.SIGMA_Z),
        ],
    }


class LogConfig(Section):
    prometheus: PrometheusConfig = Field(
        PrometheusConfig(), description="Метрики длительности спанов"
    )
    sentry: SentryConfig = Field(
        SentryConfig(), description="Отправка ошибок в Sentry"
    )


class LabConfig(BaseConfig):
    space: SpaceConfig = Field(
        SpaceConfig(), description="Одночастичное пространство"
    )
    hartree: HartreeConfig = Field(
        HartreeConfig(), description="Уравнение Хартри"
    )
    bogoliubov: BogoliubovConfig = Field(
        BogoliubovConfig(), description="Преобразование Боголюбова"
    )
    observables: Dict[str, List[ObservableConfig]] = Field(
        default_factory=_default_observables,
        description="Именованные семейства наблюдаемых",
    )
    study: StudyConfig = Field(
        StudyConfig(), description="Параметры исследований"
    )
    xi: XiConfig = Field(XiConfig(), description="Коэффициенты xi")
    log: LogConfig = Field(LogConfig(), description="Логирование")

    @validator('observables')
    def _families_not_empty(
        cls, v: Dict[str, List[ObservableConfig]]
    ) -> Dict[str, List[ObservableConfig]]:
        for name, family in v.items():
            if not family:
                raise ValueError('family %r is empty' % name)
        return v


class Laboratory(BaseApplication):
    cfg: LabConfig

    def __init__(
        self,
        cfg: LabConfig,
        command: str,
        out: str = '.',
        workers: int = 1,
        emit_resolved_config: bool = False,
    ) -> None:
        super().__init__(cfg)
        if command not in COMMANDS:
            raise ConfigurationError(
                'Unknown command %r, expected one of: %s'
                % (command, ', '.join(COMMANDS))
            )
        self.command = command
        self.config_hash = cfg.config_hash()
        self.output = Output(out, command, self.config_hash)
        self.emit_resolved_config = emit_resolved_config
        self.report: Optional[Report] = None

        self.pool = WorkerPool(workers)
        self.add('pool', self.pool)

        if cfg.log.prometheus.enabled:
            prom = cfg.log.prometheus
            if prom.textfile is None:
                prom = prom.copy(
                    update={'textfile': str(self.output.path(METRICS_FILE))}
                )
            self.logger.add(PrometheusAdapter(prom))
        if cfg.log.sentry.enabled:
            self.logger.add(SentryAdapter(cfg.log.sentry))

    async def execute(self) -> int:
        self.output.prepare()
        if self.emit_resolved_config:
            self.output.text(RESOLVED_CONFIG, self.cfg.yaml_str())
        self.log_info(
            'Running %s (config %s, %d workers)',
            self.command,
            self.config_hash[:12],
            self.pool.workers,
        )
        report = await self.run_command()
        self.report = report
        self.write(report)
        if report.passed:
            self.log_info(
                '%s passed %d criteria', self.command, len(report.criteria)
            )
            return EXIT_OK
        failed = [c.name for c in report.criteria if not c.passed]
        self.log_warn(
            '%s failed %d of %d criteria: %s',
            self.command,
            len(failed),
            len(report.criteria),
            ', '.join(failed),
        )
        return EXIT_THRESHOLD

    @wrap2span(name='lab_command', kind=Span.KIND_STUDY)
    async def run_command(self) -> Report:
        span = ctx_span_get()
        if span is not None:
            span.tag('lab.command', self.command)
        return await COMMANDS[self.command](self.cfg, self.pool)

    def summary(self, report: Report) -> Dict[str, Any]:
        data = report.summary()
        data.update(
            command=self.command,
            version=self.version,
            config_hash=self.config_hash,
            config=self.cfg.to_dict(),
        )
        return data

    def write(self, report: Report) -> None:
        for name, table in report.tables.items():
            self.output.csv(name, table.columns, table.rows)
        self.output.json('%s.json' % self.command, self.summary(report))
        self.log_info(
            'Written to %s: %s',
            os.path.abspath(str(self.output.directory)),
            ', '.join(self.output.written),
        )
