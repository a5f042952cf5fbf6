import operator

import pytest

from squatcalc import parallel
from squatcalc.parallel import (
    THREADS_ENV_VAR,
    get_n_workers,
    get_num_threads,
    map_chunks,
    parse_parallel_arg,
)


@pytest.mark.parametrize(("raw", "expected"), [
    (None, -1),
    ('', -1),
    ('0', -1),
    ('-3', -1),
    ('4', 4),
    (' 2 ', 2),
])
def test_get_num_threads(monkeypatch, raw, expected):
    if raw is None:
        monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
    else:
        monkeypatch.setenv(THREADS_ENV_VAR, raw)
    assert get_num_threads() == expected


def test_get_num_threads_bad_value(monkeypatch):
    monkeypatch.setenv(THREADS_ENV_VAR, 'many')
    with pytest.warns(UserWarning, match=THREADS_ENV_VAR):
        assert get_num_threads() == -1


@pytest.mark.parametrize("arg", [False, None, 0, 1])
def test_serial_parallel_args(arg):
    assert parse_parallel_arg(arg) is None


def test_auto_without_pool(monkeypatch):
    monkeypatch.setattr(parallel.PoolHandler, '_pool', None)
    monkeypatch.setattr(parallel, '_AUTO_BACKEND', None)
    assert parse_parallel_arg('auto') is None


def test_pool_like_objects_pass_through():

    class Pool:

        _max_workers = 3

        def submit(self, fn, *args):
            raise NotImplementedError

    pool = Pool()
    assert parse_parallel_arg(pool) is pool
    assert get_n_workers(pool) == 3
    assert get_n_workers(None) == 1


def test_bad_parallel_arg():
    with pytest.raises(ValueError):
        parse_parallel_arg('threads')
    with pytest.raises(ValueError):
        parallel.get_pool(backend='mpi', maybe_create=True)


def test_map_chunks_serial():
    chunks = [(i, 10 * i) for i in range(5)]
    assert map_chunks(operator.add, chunks) == [0, 11, 22, 33, 44]
    assert map_chunks(operator.add, []) == []


def test_map_chunks_process_pool():
    chunks = [(i, -i * i) for i in range(20)]
    assert map_chunks(operator.add, chunks, parallel=2) == [
        i - i * i for i in range(20)]
    assert parallel.PoolHandler.is_initialized()
    assert parse_parallel_arg('auto') is not None
    assert get_n_workers(parse_parallel_arg(2)) == 2


def test_map_chunks_dask():
    distributed = pytest.importorskip('distributed')
    with distributed.Client(processes=False, n_workers=2) as client:
        chunks = [(i, 1) for i in range(8)]
        assert map_chunks(operator.add, chunks, parallel=client) == list(
            range(1, 9))
        assert get_n_workers(client) == 2
