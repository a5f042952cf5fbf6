import json
import math

import pytest
import numpy as np
from numpy.testing import assert_allclose

import squatcalc as sq
from squatcalc.field import SpectralField
from squatcalc.io import (
    SQF_MAGIC,
    dumps_norms_csv,
    dumps_result,
    field_from_bytes,
    field_to_bytes,
    matrix_from_json,
    read_field,
    read_matrix,
    read_norms_csv,
    to_jsonable,
    write_field,
    write_matrix,
    write_norms_csv,
)
from squatcalc.qmatrix import QMatrixOperator, SpectralSphere
from squatcalc.quadrature import QuadSpec
from squatcalc.quaternion import Quaternion
from squatcalc.utils import rand_qmatrix


# -------------------------------- matrices --------------------------------- #

def test_matrix_json_entries():
    obj = {'n': 2, 'entries': [[[1, 2, 3, 4], "1+2i-k"],
                               [0.5, "[0, 0, 1, 0]"]]}
    T = matrix_from_json(obj)
    assert T.n == 2
    assert_allclose(T.entries[0, 0], [1, 2, 3, 4])
    assert_allclose(T.entries[0, 1], [1, 2, 0, -1])
    assert_allclose(T.entries[1, 0], [0.5, 0, 0, 0])
    assert_allclose(T.entries[1, 1], [0, 0, 1, 0])
    # n is optional
    assert matrix_from_json({'entries': obj['entries']}).allclose(T)


@pytest.mark.parametrize("obj", [
    {'n': 2},
    [[1, 2], [3, 4]],
    {'n': 3, 'entries': [[1, 2], [3, 4]]},
    {'entries': [[1, 2], [3]]},
    {'entries': [[[1, 2, 3], 0], [0, 1]]},
    {'entries': [["1+q", 0], [0, 1]]},
    {'entries': [[None, 0], [0, 1]]},
])
def test_bad_matrix_json(obj):
    with pytest.raises(sq.FormatError):
        matrix_from_json(obj)


def test_matrix_file_roundtrip(tmp_path):
    T = QMatrixOperator(rand_qmatrix(3, seed=0))
    path = str(tmp_path / 'T.json')
    write_matrix(path, T)
    with open(path) as f:
        obj = json.load(f)
    assert obj['n'] == 3
    # 17 significant digits restore every float exactly
    assert np.array_equal(read_matrix(path).entries, T.entries)


def test_read_matrix_errors(tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text('{"entries": [[1, ')
    with pytest.raises(sq.FormatError, match="invalid JSON"):
        read_matrix(str(path))
    path.write_text('{"n": 1}')
    with pytest.raises(sq.FormatError, match="bad.json"):
        read_matrix(str(path))
    with pytest.raises(OSError):
        read_matrix(str(tmp_path / 'missing.json'))


# --------------------------------- fields ---------------------------------- #

def test_field_bytes_layout():
    v = SpectralField.random((2, 3, 4), box=(1.0, 2.0, 3.0), seed=0)
    buf = field_to_bytes(v)
    assert buf[:4] == SQF_MAGIC
    assert np.frombuffer(buf, '<u4', 3, 4).tolist() == [2, 3, 4]
    assert np.frombuffer(buf, '<f8', 3, 16).tolist() == [1.0, 2.0, 3.0]
    assert len(buf) == 40 + 8 * 4 * 24
    # first index fastest
    data = np.frombuffer(buf, '<f8', offset=40)
    assert_allclose(data[:4], v.values[0, 0, 0])
    assert_allclose(data[4:8], v.values[1, 0, 0])
    assert_allclose(data[8:12], v.values[0, 1, 0])


def test_field_file_roundtrip(tmp_path):
    v = SpectralField.random((4, 5, 6), box=(1.0, 2.0, np.pi), seed=1)
    path = str(tmp_path / 'v.sqf')
    write_field(path, v)
    w = read_field(path)
    assert w.dims == v.dims
    assert w.box == v.box
    assert np.array_equal(w.values, v.values)


def test_bad_field_bytes():
    buf = field_to_bytes(SpectralField.zeros((2, 2, 2)))
    with pytest.raises(sq.FormatError, match="Truncated"):
        field_from_bytes(buf[:10])
    with pytest.raises(sq.FormatError, match="magic"):
        field_from_bytes(b'SQF2' + buf[4:])
    with pytest.raises(sq.FormatError, match="needs"):
        field_from_bytes(buf[:-8])
    with pytest.raises(sq.FormatError):
        field_from_bytes(buf + b'\x00')


def test_read_field_error_names_path(tmp_path):
    path = tmp_path / 'bad.sqf'
    path.write_bytes(b'nope')
    with pytest.raises(sq.FormatError, match="bad.sqf"):
        read_field(str(path))


# -------------------------------- results ---------------------------------- #

def test_to_jsonable():
    out = to_jsonable({
        'q': Quaternion(1.0, 2.0, 3.0, 4.0),
        'spheres': [SpectralSphere(0.0, 1.0, 1), SpectralSphere(2.0, 0.0, 2)],
        'quad': QuadSpec(panels=8),
        'flag': np.bool_(True),
        'count': np.int64(3),
        'arr': np.arange(3.0),
        1: None,
    })
    assert out == {
        'q': [1.0, 2.0, 3.0, 4.0],
        'spheres': [{'u': 0.0, 'v': 1.0, 'mult': 1},
                    {'u': 2.0, 'v': 0.0, 'mult': 2}],
        'quad': QuadSpec(panels=8).as_dict(),
        'flag': True,
        'count': 3,
        'arr': [0.0, 1.0, 2.0],
        '1': None,
    }
    assert isinstance(out['count'], int)
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_dumps_result():
    text = dumps_result({'a': [1, 0.1], 'b': {'c': math.nan}, 'd': []})
    assert '0.10000000000000001' in text
    assert '"c": NaN' in text
    assert json.loads(text)['a'] == [1, 0.1]
    assert dumps_result([math.inf, -math.inf], indent=None) == (
        '[Infinity, -Infinity]')
    # numeric leaves stay on one line
    assert '[1, 2, 3, 4]' in dumps_result({'q': Quaternion(1, 2, 3, 4)})


def test_norms_csv(tmp_path):
    rows = [(0, 0.0, 1.0, -0.5, 0.5, math.nan),
            (1, 0.1, 0.9, -0.25, 0.25, 1e-17)]
    text = dumps_norms_csv(rows)
    assert text.splitlines() == [
        'step,t,l2,min,max,form_delta',
        '0,0,1,-0.5,0.5,NaN',
        '1,0.10000000000000001,0.90000000000000002,-0.25,0.25,'
        '1.0000000000000001e-17',
    ]
    path = str(tmp_path / 'norms.csv')
    write_norms_csv(path, rows)
    header, back = read_norms_csv(path)
    assert header[0] == 'step'
    assert back[1] == [1.0, 0.1, 0.9, -0.25, 0.25, 1e-17]
    assert math.isnan(back[0][5])
