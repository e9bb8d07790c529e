import json
from enum import Enum
from pathlib import Path

import numpy as np
from pydantic import BaseModel
from pytest import raises

from mflab.misc import config_hash, dict_merge, format_float, json_encode


class Kind(str, Enum):
    GRID = 'grid'


class Model(BaseModel):
    name: str = 'x'


def test_encode_numpy() -> None:
    data = {
        'array': np.array([[1.0, 2.0], [3.0, 4.0]]),
        'int': np.int64(3),
        'float': np.float64(0.5),
        'bool': np.bool_(True),
    }
    assert json.loads(json_encode(data)) == {
        'array': [[1.0, 2.0], [3.0, 4.0]],
        'int': 3,
        'float': 0.5,
        'bool': True,
    }


def test_encode_complex() -> None:
    assert json.loads(json_encode(1.5 - 2j)) == [1.5, -2.0]
    assert json.loads(json_encode(np.complex128(0.25j))) == [0.0, 0.25]


def test_encode_misc() -> None:
    data = {'kind': Kind.GRID, 'model': Model(), 'path': Path('/tmp/x')}
    assert json.loads(json_encode(data)) == {
        'kind': 'grid',
        'model': {'name': 'x'},
        'path': '/tmp/x',
    }

    with raises(TypeError):
        json_encode(object())


def test_config_hash_ignores_key_order() -> None:
    assert config_hash({'a': 1, 'b': [1, 2]}) == config_hash(
        {'b': [1, 2], 'a': 1}
    )
    assert config_hash({'a': 1}) != config_hash({'a': 2})


def test_format_float_round_trips() -> None:
    for value in (0.1, 1.0 / 3.0, 2.0 ** -1074, 1e300, -np.pi):
        assert float(format_float(value)) == value
    assert format_float(1.0) == '1.0000000000000000e+00'


def test_dict_merge_overrides() -> None:
    base = {'study': {'N': [16, 32], 'times': [0.0]}, 'xi': {'N': [2]}}
    overlay = {'study': {'N': [64]}}
    merged = dict_merge(base, overlay)
    assert merged == {
        'study': {'N': [64], 'times': [0.0]},
        'xi': {'N': [2]},
    }
    assert base['study']['N'] == [16, 32]
