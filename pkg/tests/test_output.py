import json

import numpy as np
import pytest

from mflab.error import Error
from mflab.misc import format_float
from mflab.output import Output, format_cell


def test_format_cell():
    assert format_cell(True) == 'true'
    assert format_cell(np.bool_(False)) == 'false'
    assert format_cell(7) == '7'
    assert format_cell(np.int64(-2)) == '-2'
    assert format_cell(0.1) == format_float(0.1)
    assert float(format_cell(np.float64(0.1))) == 0.1
    assert format_cell(None) == ''
    assert format_cell('full_eig') == 'full_eig'


def test_csv(tmp_path):
    out = Output(tmp_path / 'run', 'clt', 'abc123')
    out.prepare()
    assert (tmp_path / 'run').is_dir()

    path = out.csv('clt.csv', ['N', 'ok', 'err'], [[4, True, 0.5]])
    lines = path.read_text().splitlines()
    assert lines[0] == '# mflab clt config_hash=abc123'
    assert lines[1] == 'N,ok,err'
    assert lines[2] == '4,true,%s' % format_float(0.5)
    assert out.written == ['clt.csv']

    with pytest.raises(Error):
        out.csv('bad.csv', ['a', 'b'], [[1]])
    assert not (tmp_path / 'run' / 'bad.csv').exists()


def test_json(tmp_path):
    out = Output(tmp_path, 'xi', 'f00')
    path = out.json('summary.json', {'b': 1, 'a': np.array([1.0, 2.0])})
    text = path.read_text()
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {'a': [1.0, 2.0], 'b': 1}
    assert out.written == ['summary.json']


def test_prepare_reports_failure(tmp_path):
    blocker = tmp_path / 'file'
    blocker.write_text('')
    with pytest.raises(Error):
        Output(blocker / 'sub', 'xi', 'f00').prepare()
