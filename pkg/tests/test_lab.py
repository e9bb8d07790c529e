import json

import pytest
import yaml

from mflab.app import EXIT_ERROR, EXIT_OK, EXIT_THRESHOLD
from mflab.error import ConfigurationError
from mflab.lab import LabConfig, Laboratory

SMALL_XI = {'N': [2, 10, 100, 1000], 'ell_check': 10, 'ell_rates': [2, 3]}


def _read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0], lines[1].split(','), [ln.split(',') for ln in lines[2:]]


def test_unknown_command(tmp_path):
    with pytest.raises(ConfigurationError):
        Laboratory(LabConfig(), 'nothing', out=str(tmp_path))


def test_run_writes_results(tmp_path):
    cfg = LabConfig.from_dict({'xi': SMALL_XI})
    app = Laboratory(cfg, 'xi', out=str(tmp_path / 'run'))
    app._version = '0.0.1'
    assert app.run() == EXIT_OK

    comment, columns, rows = _read_csv(tmp_path / 'run' / 'xi_norms.csv')
    assert comment == '# mflab xi config_hash=%s' % cfg.config_hash()
    assert columns[:2] == ['N', 'ell_max']
    assert [r[0] for r in rows] == ['2', '10', '100', '1000']
    assert all('e' in r[2] for r in rows)

    summary = json.loads((tmp_path / 'run' / 'xi.json').read_text())
    assert summary['command'] == 'xi'
    assert summary['version'] == '0.0.1'
    assert summary['config_hash'] == cfg.config_hash()
    assert summary['config']['xi']['N'] == [2, 10, 100, 1000]
    assert summary['passed'] is True
    assert {c['name'] for c in summary['criteria']} >= {
        'agreement_N2',
        'ratio_N1000',
        'diff5_slope',
        'slope_l3',
    }
    assert app.report is not None and app.report.passed

    assert not (tmp_path / 'run' / 'resolved-config.yaml').exists()
    assert not (tmp_path / 'run' / 'metrics.prom').exists()


def test_failed_criterion_exit_code(tmp_path):
    cfg = LabConfig.from_dict({'xi': dict(SMALL_XI, agreement=-1.0)})
    app = Laboratory(cfg, 'xi', out=str(tmp_path))
    assert app.run() == EXIT_THRESHOLD

    summary = json.loads((tmp_path / 'xi.json').read_text())
    assert summary['passed'] is False
    failed = [c['name'] for c in summary['criteria'] if not c['passed']]
    assert failed == ['agreement_N%d' % n for n in (2, 10, 100, 1000)]


def test_domain_error_exit_code(tmp_path, lab_config, caplog):
    cfg = lab_config(study={'families': ['missing']})
    app = Laboratory(cfg, 'covariance', out=str(tmp_path))
    assert app.run() == EXIT_ERROR
    assert 'StudyError' in caplog.text
    assert 'missing' in caplog.text


def test_resolved_config_and_metrics(tmp_path):
    cfg = LabConfig.from_dict(
        {'xi': SMALL_XI, 'log': {'prometheus': {'enabled': True}}}
    )
    app = Laboratory(
        cfg, 'xi', out=str(tmp_path), emit_resolved_config=True
    )
    assert app.run() == EXIT_OK

    resolved = yaml.safe_load((tmp_path / 'resolved-config.yaml').read_text())
    assert LabConfig.from_dict(resolved).config_hash() == cfg.config_hash()

    metrics = (tmp_path / 'metrics.prom').read_text()
    assert 'lab_command_count{command="xi",error=""} 1.0' in metrics
    assert 'study_task_count{error="",study="xi"} 4.0' in metrics


def test_hartree_command(tmp_path, lab_config):
    cfg = lab_config(
        hartree={'dump_every': 10},
        study={'dt_values': [0.05, 0.025, 0.0125, 0.00625]},
    )
    app = Laboratory(cfg, 'hartree', out=str(tmp_path))
    assert app.run() == EXIT_OK

    comment, columns, rows = _read_csv(tmp_path / 'hartree_trajectory.csv')
    assert columns == ['t', 'energy', 'norm', 're_0', 'im_0', 're_1', 'im_1']
    # 100 steps dumped every 10th node
    assert len(rows) == 11
    assert float(rows[0][0]) == 0.0
    assert float(rows[-1][0]) == pytest.approx(0.5)
    assert float(rows[0][3]) == pytest.approx(0.8)

    summary = json.loads((tmp_path / 'hartree.json').read_text())
    order = [f for f in summary['fits'] if f['quantity'] == 'hartree']
    assert len(order) == 1
    assert order[0]['slope'] > 3.5


def test_output_independent_of_workers(tmp_path, lab_config):
    cfg = lab_config(
        study={'N': [2, 3, 4, 5], 'times': [0.0, 0.5], 'tau_points': 5}
    )
    for workers in (1, 4):
        app = Laboratory(
            cfg, 'clt', out=str(tmp_path / str(workers)), workers=workers
        )
        assert app.pool.workers == workers
        assert app.run() in (EXIT_OK, EXIT_THRESHOLD)

    names = sorted(p.name for p in (tmp_path / '1').iterdir())
    assert names == ['clt.csv', 'clt.json']
    assert names == sorted(p.name for p in (tmp_path / '4').iterdir())
    for name in names:
        single = (tmp_path / '1' / name).read_bytes()
        assert single == (tmp_path / '4' / name).read_bytes()
