"""Pools for evaluating independent chunks of quadrature nodes, and the
thread count handed to ``scipy.fft``.

The ``parallel`` keyword accepted throughout the package is parsed by
:func:`parse_parallel_arg`:

- ``False`` (default): evaluate in the calling process,
- ``'auto'``: reuse an existing pool, else run serially,
- ``True``: reuse or create a process pool,
- an ``int``: a process pool with that many workers,
- ``'dask'``: an existing or new ``dask.distributed`` client,
- anything with a ``submit`` method: used as is.
"""
import os
import atexit
import numbers
import warnings
import functools


THREADS_ENV_VAR = 'SQUATCALC_THREADS'

_DEFAULT_BACKEND = 'concurrent.futures'
_AUTO_BACKEND = None


def get_num_threads():
    """Number of threads from ``$SQUATCALC_THREADS``, with ``-1`` (all cores)
    when unset or zero. Passed as ``workers=`` to ``scipy.fft`` and used to
    size created process pools.
    """
    raw = os.environ.get(THREADS_ENV_VAR, '0').strip() or '0'
    try:
        n = int(raw)
    except ValueError:
        warnings.warn(f"Ignoring non-integer {THREADS_ENV_VAR}={raw!r}.")
        return -1
    if n <= 0:
        return -1
    return n


def _default_n_workers():
    n = get_num_threads()
    return None if n == -1 else n


def get_pool(n_workers=None, maybe_create=False, backend=None):
    """Get a parallel pool of type ``backend``.
    """
    if backend is None:
        backend = _DEFAULT_BACKEND

    if backend == 'concurrent.futures':
        if not maybe_create and not PoolHandler.is_initialized():
            return None
        return PoolHandler(n_workers or _default_n_workers())

    if backend == 'dask':
        return _get_pool_dask(n_workers=n_workers or _default_n_workers(),
                              maybe_create=maybe_create)

    raise ValueError(f"Unknown parallel backend {backend!r}, choose from "
                     "'concurrent.futures' or 'dask'.")


@functools.lru_cache(None)
def _infer_backend_cached(pool_class):
    root = pool_class.__module__.split('.')[0]
    if root == 'concurrent':
        return 'concurrent.futures'
    if root == 'distributed':
        return 'dask'
    return root


def _infer_backend(pool):
    return _infer_backend_cached(pool.__class__)


def get_n_workers(pool=None):
    """How many workers ``pool`` has, used to size the chunks.
    """
    if pool is None:
        return 1
    try:
        return pool._max_workers
    except AttributeError:
        pass
    if _infer_backend(pool) == 'dask':
        return len(pool.scheduler_info()['workers'])
    raise ValueError(f"Can't find number of workers in pool {pool}.")


def parse_parallel_arg(parallel):
    """Turn the ``parallel`` keyword into ``None`` (serial) or a pool.
    """
    global _AUTO_BACKEND

    if parallel is False or parallel is None:
        return None

    if parallel == 'auto':
        return get_pool(maybe_create=False, backend=_AUTO_BACKEND)

    if parallel is True:
        if _AUTO_BACKEND is None:
            _AUTO_BACKEND = _DEFAULT_BACKEND
        return get_pool(maybe_create=True, backend=_AUTO_BACKEND)

    if isinstance(parallel, numbers.Integral):
        if parallel <= 1:
            return None
        _AUTO_BACKEND = _DEFAULT_BACKEND
        return get_pool(n_workers=parallel, maybe_create=True)

    if parallel in ('concurrent.futures', 'dask'):
        _AUTO_BACKEND = parallel
        return get_pool(maybe_create=True, backend=parallel)

    if hasattr(parallel, 'submit'):
        return parallel

    raise ValueError(f"Can't interpret parallel={parallel!r}.")


def submit(pool, fn, *args, **kwargs):
    """Submit ``fn(*args, **kwargs)`` to ``pool``.
    """
    if _infer_backend(pool) == 'dask':
        kwargs.setdefault('pure', False)
    return pool.submit(fn, *args, **kwargs)


def map_chunks(fn, chunks, parallel=False):
    """``[fn(*chunk) for chunk in chunks]``, possibly on a pool. The order of
    the results always matches ``chunks`` so that sums over them are
    reproducible.
    """
    pool = parse_parallel_arg(parallel)
    if pool is None:
        return [fn(*chunk) for chunk in chunks]
    futures = [submit(pool, fn, *chunk) for chunk in chunks]
    return [f.result() for f in futures]


# --------------------------- concurrent.futures ---------------------------- #

class CachedProcessPoolExecutor:
    """A single process pool, recreated only when the requested number of
    workers changes.
    """

    def __init__(self):
        self._pool = None
        self._n_workers = -1

    def __call__(self, n_workers=None):
        if self._pool is None or (n_workers is not None and
                                  n_workers != self._n_workers):
            from concurrent.futures import ProcessPoolExecutor
            self.shutdown()
            self._pool = ProcessPoolExecutor(n_workers)
            self._n_workers = n_workers
        return self._pool

    def is_initialized(self):
        return self._pool is not None

    def shutdown(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None


PoolHandler = CachedProcessPoolExecutor()


@atexit.register
def _shutdown_cached_process_pool():
    PoolHandler.shutdown()


# ---------------------------------- dask ----------------------------------- #

def _get_pool_dask(n_workers=None, maybe_create=False):
    """Get the current ``dask.distributed`` client, optionally creating a
    local cluster if there is none.
    """
    try:
        from dask.distributed import get_client
    except ImportError:
        if not maybe_create:
            return None
        raise

    try:
        client = get_client()
    except ValueError:
        if not maybe_create:
            return None
        from dask.distributed import Client, LocalCluster
        client = Client(LocalCluster(n_workers=n_workers,
                                     threads_per_worker=1))
        warnings.warn("No dask client found, created one with "
                      f"{get_n_workers(client)} workers.")

    if n_workers is not None and n_workers != get_n_workers(client):
        warnings.warn(f"Existing dask client has {get_n_workers(client)} "
                      f"workers, not the requested {n_workers}.")
    return client
