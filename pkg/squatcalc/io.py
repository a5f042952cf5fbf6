"""Reading and writing matrices, fields and results.

- matrices: JSON ``{"n": n, "entries": [[[w, x, y, z], ...], ...]}``, entries
  may also be quaternion strings such as ``"1+2i-k"``,
- fields: the binary SQF1 format, little endian: the magic ``b'SQF1'``,
  three ``uint32`` sizes, three ``float64`` periods, then one ``float64``
  quadruple ``(w, x, y, z)`` per grid point with the first index fastest,
- results: JSON or CSV with floats written to 17 significant digits.
"""
import csv
import functools
import json
import math
import numbers
from io import StringIO

import numpy as np

from .errors import FormatError
from .contour import ContourSpec
from .field import SpectralField
from .qmatrix import QMatrixOperator, SpectralSphere
from .quadrature import QuadSpec
from .quaternion import Quaternion, parse_quaternion
from .utils import format_float


SQF_MAGIC = b'SQF1'
SQF_HEADER = np.dtype([('magic', 'S4'), ('dims', '<u4', (3,)),
                       ('box', '<f8', (3,))])


# -------------------------------- matrices --------------------------------- #

def _entry(x, where):
    if isinstance(x, str):
        return tuple(parse_quaternion(x))
    if isinstance(x, numbers.Real):
        return (float(x), 0.0, 0.0, 0.0)
    if isinstance(x, (list, tuple)) and len(x) == 4:
        return tuple(map(float, x))
    raise FormatError(f"Bad matrix entry {x!r} at {where}.")


def matrix_from_json(obj):
    """Build a :class:`QMatrixOperator` from parsed matrix JSON.
    """
    try:
        rows = obj['entries']
    except (KeyError, TypeError):
        raise FormatError("Matrix JSON needs an 'entries' key.")
    n = obj.get('n', len(rows))
    if len(rows) != n or any(len(r) != n for r in rows):
        raise FormatError(f"Matrix JSON declares n={n} but its entries are "
                          f"not {n} x {n}.")
    try:
        entries = [[_entry(x, (i, j)) for j, x in enumerate(r)]
                   for i, r in enumerate(rows)]
    except ValueError as e:
        raise FormatError(str(e)) from e
    return QMatrixOperator(np.array(entries, dtype=float).reshape(n, n, 4))


def read_matrix(path):
    """Read a matrix JSON file.

    Raises
    ------
    OSError
        If the file can't be read.
    FormatError
        If it isn't a valid matrix file.
    """
    with open(path, 'r') as f:
        try:
            obj = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f"{path}: invalid JSON ({e}).") from e
    try:
        return matrix_from_json(obj)
    except FormatError as e:
        raise FormatError(f"{path}: {e}") from e


def write_matrix(path, T):
    with open(path, 'w') as f:
        f.write(dumps_result(T))
        f.write('\n')


# --------------------------------- fields ---------------------------------- #

def field_to_bytes(field):
    header = np.zeros((), dtype=SQF_HEADER)
    header['magic'] = SQF_MAGIC
    header['dims'] = field.dims
    header['box'] = field.box
    # first index fastest
    data = np.ascontiguousarray(field.values.transpose(2, 1, 0, 3),
                                dtype='<f8')
    return header.tobytes() + data.tobytes()


def field_from_bytes(buf):
    if len(buf) < SQF_HEADER.itemsize:
        raise FormatError(f"Truncated SQF1 header ({len(buf)} bytes).")
    header = np.frombuffer(buf, dtype=SQF_HEADER, count=1)[0]
    if bytes(header['magic']) != SQF_MAGIC:
        raise FormatError(f"Bad magic {bytes(header['magic'])!r}, expected "
                          f"{SQF_MAGIC!r}.")
    dims = tuple(int(n) for n in header['dims'])
    box = tuple(float(L) for L in header['box'])
    n = int(np.prod(dims)) * 4
    expected = SQF_HEADER.itemsize + 8 * n
    if len(buf) != expected:
        raise FormatError(f"SQF1 data for dims {dims} needs {expected} "
                          f"bytes, got {len(buf)}.")
    data = np.frombuffer(buf, dtype='<f8', count=n,
                         offset=SQF_HEADER.itemsize)
    values = data.reshape(dims[2], dims[1], dims[0], 4).transpose(2, 1, 0, 3)
    try:
        return SpectralField(values.astype(float), box)
    except ValueError as e:
        raise FormatError(str(e)) from e


def read_field(path):
    """Read an SQF1 field file.
    """
    with open(path, 'rb') as f:
        buf = f.read()
    try:
        return field_from_bytes(buf)
    except FormatError as e:
        raise FormatError(f"{path}: {e}") from e


def write_field(path, field):
    with open(path, 'wb') as f:
        f.write(field_to_bytes(field))


# -------------------------------- results ---------------------------------- #

@functools.singledispatch
def to_jsonable(obj):
    """Convert results to nested dicts, lists, strings and numbers.
    """
    if hasattr(obj, '_asdict'):
        return {k: to_jsonable(v) for k, v in obj._asdict().items()}
    raise TypeError(f"Can't serialise {type(obj).__name__}.")


@to_jsonable.register(type(None))
@to_jsonable.register(bool)
@to_jsonable.register(str)
def _(obj):
    return obj


@to_jsonable.register(np.bool_)
def _(obj):
    return bool(obj)


@to_jsonable.register(numbers.Integral)
def _(obj):
    return int(obj)


@to_jsonable.register(numbers.Real)
def _(obj):
    return float(obj)


@to_jsonable.register(np.ndarray)
def _(obj):
    return to_jsonable(obj.tolist())


@to_jsonable.register(list)
@to_jsonable.register(tuple)
def _(obj):
    if hasattr(obj, '_asdict'):
        return {k: to_jsonable(v) for k, v in obj._asdict().items()}
    return [to_jsonable(x) for x in obj]


@to_jsonable.register(dict)
def _(obj):
    return {str(k): to_jsonable(v) for k, v in obj.items()}


@to_jsonable.register(Quaternion)
def _(obj):
    return [float(x) for x in obj]


@to_jsonable.register(SpectralSphere)
def _(obj):
    return {'u': float(obj.u), 'v': float(obj.v), 'mult': int(obj.mult)}


@to_jsonable.register(QMatrixOperator)
def _(obj):
    return {'n': obj.n, 'entries': to_jsonable(obj.entries)}


@to_jsonable.register(ContourSpec)
def _(obj):
    return to_jsonable(obj.describe())


@to_jsonable.register(QuadSpec)
def _(obj):
    return obj.as_dict()


def _dump_float(x):
    if math.isnan(x):
        return 'NaN'
    if math.isinf(x):
        return 'Infinity' if x > 0 else '-Infinity'
    return format_float(x)


def _dumps(obj, indent, level):
    pad = '' if indent is None else '\n' + ' ' * (indent * (level + 1))
    end = '' if indent is None else '\n' + ' ' * (indent * level)
    sep = ', ' if indent is None else ','
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _dump_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return '{}'
        items = (f"{pad}{json.dumps(k)}: {_dumps(v, indent, level + 1)}"
                 for k, v in obj.items())
        return '{' + sep.join(items) + end + '}'
    if not obj:
        return '[]'
    # keep numeric leaves such as quaternions on one line
    if all(isinstance(x, (int, float)) for x in obj):
        return '[' + ', '.join(_dumps(x, None, 0) for x in obj) + ']'
    items = (pad + _dumps(x, indent, level + 1) for x in obj)
    return '[' + sep.join(items) + end + ']'


def dumps_result(result, indent=2):
    """Serialise ``result`` as JSON with 17 significant digit floats and
    the key order of the objects themselves.

    Examples
    --------

        >>> print(dumps_result(Quaternion(1.0, 0.1)))
        [1, 0.10000000000000001, 0, 0]

    """
    return _dumps(to_jsonable(result), indent, 0)


def dumps_norms_csv(rows, header=None):
    """Heat norm rows (``step, t, l2, min, max, form_delta``) as CSV text.

    Examples
    --------

        >>> print(dumps_norms_csv([(0, 0.0, 1.0, -0.5, 0.5, float('nan'))]),
        ...       end='')
        step,t,l2,min,max,form_delta
        0,0,1,-0.5,0.5,NaN

    """
    if header is None:
        from .heat import NORMS_HEADER as header
    buf = StringIO()
    w = csv.writer(buf, lineterminator='\n')
    w.writerow(header)
    for row in rows:
        w.writerow([str(x) if isinstance(x, numbers.Integral)
                    else _dump_float(float(x)) for x in row])
    return buf.getvalue()


def write_norms_csv(path, rows, header=None):
    with open(path, 'w', newline='') as f:
        f.write(dumps_norms_csv(rows, header))


def read_norms_csv(path):
    with open(path, 'r', newline='') as f:
        r = csv.reader(f)
        header = next(r)
        return header, [[float(x) for x in row] for row in r]
