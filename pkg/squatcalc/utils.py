"""Small shared helpers: toolz imports, progress bars, random test
operators and set distances.
"""
import numpy as np

try:
    from cytoolz import groupby, partition_all
except ImportError:
    from toolz import groupby, partition_all


__all__ = ('groupby', 'partition_all')


def get_rng(seed=None):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def progbar(it=None, progbar=False, **kwargs):
    """Optionally wrap ``it`` in a ``tqdm`` progress bar.
    """
    if not progbar:
        return it
    import tqdm
    return tqdm.tqdm(it, **kwargs)


def rand_quaternion(size=None, scale=1.0, seed=None):
    """Quaternions with standard normal components, as an array of shape
    ``size + (4,)``.
    """
    rng = get_rng(seed)
    shape = (4,) if size is None else tuple(np.atleast_1d(size)) + (4,)
    return scale * rng.standard_normal(shape)


def rand_qmatrix(n, scale=None, commuting=False, seed=None):
    """A random dense quaternionic ``n x n`` matrix, returned as entries of
    shape ``(n, n, 4)``.

    Parameters
    ----------
    n : int
        Size.
    scale : float, optional
        Entry scale, by default ``1 / sqrt(n)`` so that the spectrum stays
        of order one.
    commuting : bool, optional
        If true, build ``T = A0 + A1 e1 + A2 e2 + A3 e3`` with all ``Ai``
        polynomials in one random symmetric matrix, so the components
        commute.
    seed : None, int or numpy.random.Generator, optional
        Seed for repeatability.
    """
    rng = get_rng(seed)
    if scale is None:
        scale = 1.0 / np.sqrt(n)
    if not commuting:
        return scale * rng.standard_normal((n, n, 4))
    B = rng.standard_normal((n, n))
    S = scale * (B + B.T) / 2
    comps = []
    for _ in range(4):
        c0, c1, c2 = rng.standard_normal(3)
        comps.append(c0 * np.eye(n) + c1 * S + 0.5 * c2 * S @ S)
    return np.stack(comps, axis=-1)


def rand_commuting_qmatrix(n, scale=None, seed=None):
    return rand_qmatrix(n, scale=scale, commuting=True, seed=seed)


def rand_unitary(n, seed=None):
    """A random quaternionic unitary ``U`` (``U* U = I``), by Gram-Schmidt
    on random columns with the inner product ``<a, b> = sum conj(a_i) b_i``.
    """
    from .quaternion import qconj_array, qmul_array

    rng = get_rng(seed)
    cols = []
    for _ in range(n):
        v = rng.standard_normal((n, 4))
        for u in cols:
            # remove u <u, v>
            c = qmul_array(qconj_array(u), v).sum(axis=0)
            v = v - qmul_array(u, c)
        cols.append(v / np.linalg.norm(v))
    return np.stack(cols, axis=1)


def rand_sectorial_qmatrix(n, angle=np.pi / 3, shift=1.0, seed=None):
    """Entries of a normal quaternionic matrix ``U D U*`` whose S-spectrum
    lies strictly inside the sector ``|arg s| < angle`` and outside the
    ball of radius ``shift``.
    """
    from .quaternion import qconj_array, qmul_array

    rng = get_rng(seed)
    r = shift + rng.exponential(1.0, size=n)
    theta = 0.9 * rng.uniform(0.0, angle, size=n)
    axis = rng.standard_normal((n, 3))
    axis /= np.linalg.norm(axis, axis=1, keepdims=True)
    D = np.zeros((n, n, 4))
    D[np.arange(n), np.arange(n), 0] = r * np.cos(theta)
    D[np.arange(n), np.arange(n), 1:] = (r * np.sin(theta))[:, None] * axis

    U = rand_unitary(n, seed=rng)
    Uh = qconj_array(np.swapaxes(U, 0, 1))
    UD = qmul_array(U[:, :, None, :], D[None, :, :, :]).sum(axis=1)
    return qmul_array(UD[:, :, None, :], Uh[None, :, :, :]).sum(axis=1)


def hausdorff_distance(a, b):
    """Hausdorff distance between two finite sets of complex numbers.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return np.inf
    D = np.abs(a[:, None] - b[None, :])
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def format_float(x):
    """Round-trip representation with 17 significant digits.
    """
    return f"{float(x):.17g}"


def rand_field(dims, box=None, real=False, seed=None):
    """A :class:`~squatcalc.field.SpectralField` with standard normal
    values, scalar only if ``real``.
    """
    from .field import SpectralField

    return SpectralField.random(dims, box=box, real=real, seed=seed)
