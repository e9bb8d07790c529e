import os
from typing import TYPE_CHECKING, Dict, Optional, Sequence, Union

from prometheus_client import CollectorRegistry, Histogram, write_to_textfile
from pydantic import Field

import mflab.misc as misc

from ..span import Span
from ._abc import AbcAdapter, AbcConfig

if TYPE_CHECKING:  # pragma: no cover
    from ..logger import Logger

LabelsCfg = Dict[str, Dict[str, str]]

DEFAULT_LE = '0.001,0.01,0.1,0.5,1.0,5.0,10.0,60.0,300.0,900.0,Inf'

DEFAULT_HISTOGRAM_LABELS: LabelsCfg = {  # {name: {label: tag}, }
    'lab_command': {
        'le': DEFAULT_LE,  # le mapping to quantiles
        'command': 'lab.command',
        'error': 'error.class',
    },
    'study_task': {
        'le': DEFAULT_LE,
        'study': 'study.name',
        'error': 'error.class',
    },
    'hartree_evolve': {
        'le': DEFAULT_LE,
        'method': 'hartree.method',
        'error': 'error.class',
    },
    'bogoliubov_propagate': {
        'le': DEFAULT_LE,
        'integrator': 'bogoliubov.integrator',
        'error': 'error.class',
    },
    'fock_evolve': {
        'le': DEFAULT_LE,
        'method': 'fock.method',
        'error': 'error.class',
    },
}
DEFAULT_HISTOGRAM_DOCS = {
    'lab_command': 'Subcommand run',
    'study_task': 'Study task for one particle number',
    'hartree_evolve': 'Hartree trajectory solve',
    'bogoliubov_propagate': 'Bogoliubov propagator solve',
    'fock_evolve': 'Many-body state propagation',
}


class PrometheusConfig(AbcConfig):
    textfile: Optional[str] = Field(
        None,
        description="Файл для выгрузки метрик в текстовом формате "
        "Prometheus (по умолчанию metrics.prom в каталоге результатов)",
    )
    hist_labels: LabelsCfg = Field(
        {}, description="Дополнительные гистограммы: {имя: {метка: тег}}"
    )
    hist_docs: Dict[str, str] = Field(
        {}, description="Описания дополнительных гистограмм"
    )


class PrometheusAdapter(AbcAdapter):
    cfg: PrometheusConfig

    def __init__(self, cfg: PrometheusConfig) -> None:
        self.cfg = cfg
        self.registry = CollectorRegistry()
        self.p8s_hists: Dict[str, Histogram] = {}
        self.p8s_hist_labels: LabelsCfg = {}
        self.p8s_hist_docs: Dict[str, str] = {}

    async def start(self, logger: 'Logger') -> None:
        self.registry = CollectorRegistry()
        self.p8s_hists = {}

        self.p8s_hist_labels = misc.dict_merge(
            DEFAULT_HISTOGRAM_LABELS, self.cfg.hist_labels
        )
        self.p8s_hist_docs = misc.dict_merge(
            DEFAULT_HISTOGRAM_DOCS, self.cfg.hist_docs
        )

        for hist_name, labels_cfg in self.p8s_hist_labels.items():
            buckets: Sequence[Union[float, str]] = Histogram.DEFAULT_BUCKETS
            if 'le' in labels_cfg:
                buckets = labels_cfg['le'].split(',')
            self.p8s_hists[hist_name] = Histogram(
                hist_name,
                self.p8s_hist_docs.get(hist_name) or hist_name,
                labelnames=[k for k in labels_cfg if k != 'le'],
                buckets=buckets,
                registry=self.registry,
            )

    def handle(self, span: Span) -> None:
        hist = self.p8s_hists.get(span.name)
        if hist is None:
            return
        labels = {
            label: span.tags.get(tag) or ''
            for label, tag in self.p8s_hist_labels[span.name].items()
            if label != 'le'
        }
        if labels:
            hist = hist.labels(**labels)
        hist.observe(span.duration)

    async def stop(self) -> None:
        if self.cfg.textfile is None:
            return
        directory = os.path.dirname(self.cfg.textfile)
        if directory:
            os.makedirs(directory, exist_ok=True)
        write_to_textfile(self.cfg.textfile, self.registry)
