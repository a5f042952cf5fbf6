"""Quaternion valued fields on a periodic three dimensional grid.

A :class:`SpectralField` holds one quaternion ``v0 + v1 e1 + v2 e2 + v3 e3``
per grid point. Besides the componentwise discrete Fourier transform it
exposes the transform of the splitting::

    v = a + e2 b,    a = v0 + i v1,    b = v2 - i v3

with ``i`` identified with ``e1``, in which the nabla operator acts on each
Fourier mode as a ``2 x 2`` complex matrix.
"""
import functools
import numbers

import numpy as np
import scipy.fft

from .errors import DimensionError
from .parallel import get_num_threads
from .quaternion import Quaternion, as_qarray, qconj_array, qmul_array
from .utils import get_rng


# ------------------------------ wavenumbers -------------------------------- #

@functools.lru_cache(64)
def wavenumbers(dims, box):
    """Angular wavenumbers ``2 pi k / L`` per axis in FFT order. For even
    ``N`` the unpaired Nyquist index is set to zero, so that odd order
    derivatives of real fields stay real.

    Examples
    --------

        >>> wavenumbers((4,), (2 * np.pi,))[0]
        array([ 0.,  1.,  0., -1.])

    """
    out = []
    for n, L in zip(dims, box):
        xi = 2 * np.pi * scipy.fft.fftfreq(n, d=L / n)
        if n % 2 == 0:
            xi[n // 2] = 0.0
        xi.setflags(write=False)
        out.append(xi)
    return tuple(out)


@functools.lru_cache(16)
def wavevectors(dims, box):
    """The three broadcastable wavenumber arrays and the magnitude
    ``|xi|`` on the full lattice.
    """
    x1, x2, x3 = wavenumbers(dims, box)
    xi = (x1[:, None, None], x2[None, :, None], x3[None, None, :])
    nu = np.sqrt(xi[0]**2 + xi[1]**2 + xi[2]**2)
    nu.setflags(write=False)
    return xi, nu


def _fftn(x):
    return scipy.fft.fftn(x, axes=(0, 1, 2), workers=get_num_threads())


def _ifftn(x):
    return scipy.fft.ifftn(x, axes=(0, 1, 2), workers=get_num_threads())


# -------------------------------- the field -------------------------------- #

class SpectralField:
    """A quaternion valued field on the periodic box ``[0, L1) x [0, L2) x
    [0, L3)``.

    Parameters
    ----------
    values : array_like
        Shape ``(N1, N2, N3, 4)``, or ``(N1, N2, N3)`` for a real (scalar)
        field.
    box : sequence of float, optional
        The periods ``(L1, L2, L3)``, by default ``2 pi`` each.
    """

    __slots__ = ('dims', 'box', 'values', '_hat', '_split')

    def __init__(self, values, box=None):
        values = np.asarray(values, dtype=float)
        if values.ndim == 3:
            values = np.concatenate(
                [values[..., None], np.zeros(values.shape + (3,))], axis=-1)
        if values.ndim != 4 or values.shape[-1] != 4:
            raise DimensionError(f"Field values must have shape (N1, N2, N3,"
                                 f" 4), got {values.shape}.")
        if box is None:
            box = (2 * np.pi,) * 3
        box = tuple(float(L) for L in box)
        if len(box) != 3 or min(box) <= 0.0:
            raise DimensionError(f"Need three positive periods, got {box}.")
        values.setflags(write=False)
        self.values = values
        self.dims = tuple(int(n) for n in values.shape[:3])
        self.box = box
        self._hat = None
        self._split = None

    # ------------------------------ constructors --------------------------- #

    @classmethod
    def zeros(cls, dims, box=None):
        return cls(np.zeros(tuple(dims) + (4,)), box)

    @classmethod
    def constant(cls, q, dims, box=None):
        q = as_qarray(q)
        return cls(np.broadcast_to(q, tuple(dims) + (4,)).copy(), box)

    @classmethod
    def from_function(cls, fn, dims, box=None):
        """Sample ``fn(x1, x2, x3)`` on the grid. ``fn`` may return a real
        array (a scalar field) or one with a trailing axis of length 4.
        """
        tmp = cls.zeros(dims, box)
        x1, x2, x3 = tmp.grid()
        values = np.asarray(fn(x1, x2, x3), dtype=float)
        if values.shape[:3] != tmp.dims:
            values = np.broadcast_to(values, tmp.dims + values.shape[3:])
        return cls(values, tmp.box)

    @classmethod
    def single_mode(cls, k, dims, box=None, amplitude=1.0, phase=0.0):
        """``amplitude * cos(xi . x + phase)`` for the integer wave index
        ``k``; ``amplitude`` may be a quaternion.
        """
        amp = as_qarray(amplitude)
        tmp = cls.zeros(dims, box)
        x = tmp.grid()
        arg = sum(2 * np.pi * kl / L * xl
                  for kl, L, xl in zip(k, tmp.box, x))
        return cls(np.cos(arg + phase)[..., None] * amp, tmp.box)

    @classmethod
    def gaussian(cls, dims, box=None, width=None, centre=None, amplitude=1.0):
        """A periodised Gaussian bump, by default centred in the box with a
        width of a tenth of the smallest period.
        """
        tmp = cls.zeros(dims, box)
        if width is None:
            width = 0.1 * min(tmp.box)
        if centre is None:
            centre = tuple(0.5 * L for L in tmp.box)
        r2 = 0.0
        for xl, cl, L in zip(tmp.grid(), centre, tmp.box):
            d = (xl - cl + 0.5 * L) % L - 0.5 * L
            r2 = r2 + d**2
        return cls(amplitude * np.exp(-0.5 * r2 / width**2), tmp.box)

    @classmethod
    def random(cls, dims, box=None, real=False, seed=None):
        """Independent standard normal values, scalar only if ``real``.
        """
        rng = get_rng(seed)
        shape = tuple(dims) if real else tuple(dims) + (4,)
        return cls(rng.standard_normal(shape), box)

    @classmethod
    def from_splitting(cls, a_hat, b_hat, box=None):
        """Inverse of :meth:`splitting`.
        """
        a = _ifftn(a_hat)
        b = _ifftn(b_hat)
        values = np.stack([a.real, a.imag, b.real, -b.imag], axis=-1)
        return cls(values, box)

    @classmethod
    def from_hat(cls, hat, box=None):
        """Inverse of :meth:`hat`, discarding imaginary round off.
        """
        return cls(_ifftn(hat).real, box)

    # ------------------------------- geometry ------------------------------ #

    @property
    def n_points(self):
        return int(np.prod(self.dims))

    @property
    def spacing(self):
        return tuple(L / n for L, n in zip(self.box, self.dims))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    def grid(self):
        """Broadcastable coordinate arrays ``x_l = j L_l / N_l``.
        """
        x = [np.arange(n) * h for n, h in zip(self.dims, self.spacing)]
        return (x[0][:, None, None], x[1][None, :, None],
                x[2][None, None, :])

    def wavevectors(self):
        return wavevectors(self.dims, self.box)

    def same_grid(self, other):
        return self.dims == other.dims and np.allclose(self.box, other.box)

    def _check_grid(self, other):
        if not self.same_grid(other):
            raise DimensionError(f"Fields live on different grids: "
                                 f"{self.dims} {self.box} vs {other.dims} "
                                 f"{other.box}.")

    # ------------------------------ transforms ----------------------------- #

    def hat(self):
        """Componentwise DFT, shape ``(N1, N2, N3, 4)`` complex (cached).
        """
        if self._hat is None:
            self._hat = _fftn(self.values)
        return self._hat

    def splitting(self):
        """DFTs ``(a_hat, b_hat)`` of the complex parts of ``v = a + e2 b``
        (cached).
        """
        if self._split is None:
            v = self.values
            self._split = (_fftn(v[..., 0] + 1j * v[..., 1]),
                           _fftn(v[..., 2] - 1j * v[..., 3]))
        return self._split

    # -------------------------------- parts -------------------------------- #

    @property
    def scalar(self):
        return self.values[..., 0]

    @property
    def vector(self):
        return self.values[..., 1:]

    def is_real(self, atol=0.0):
        return bool(np.all(np.abs(self.vector) <= atol))

    def with_values(self, values):
        return SpectralField(values, self.box)

    # ------------------------------- measures ------------------------------ #

    def l2_norm(self):
        """``(int |v|^2 dx)^(1/2)`` by the rectangle rule.
        """
        return float(np.sqrt(np.sum(self.values**2) * self.cell_volume))

    def inner(self, other):
        """The quaternionic inner product ``int conj(u) v dx``.
        """
        self._check_grid(other)
        q = qmul_array(qconj_array(self.values), other.values)
        return Quaternion.from_array(q.sum(axis=(0, 1, 2)) *
                                     self.cell_volume)

    def minmax(self):
        """Minimum and maximum of the scalar part.
        """
        return float(self.scalar.min()), float(self.scalar.max())

    # ------------------------------ arithmetic ----------------------------- #

    def __add__(self, other):
        self._check_grid(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        self._check_grid(other)
        return self.with_values(self.values - other.values)

    def __neg__(self):
        return self.with_values(-self.values)

    def __mul__(self, c):
        """Right multiplication by a real number or quaternion.
        """
        if isinstance(c, numbers.Real):
            return self.with_values(self.values * float(c))
        return self.with_values(qmul_array(self.values, as_qarray(c)))

    def __rmul__(self, c):
        """Left multiplication by a real number or quaternion.
        """
        if isinstance(c, numbers.Real):
            return self.with_values(self.values * float(c))
        return self.with_values(qmul_array(as_qarray(c), self.values))

    def __repr__(self):
        return (f"SpectralField(dims={self.dims}, "
                f"box=({', '.join(f'{L:.6g}' for L in self.box)}))")


def rel_l2_error(u, v):
    """``|u - v| / max(|v|, tiny)`` in the grid L2 norm.
    """
    den = max(v.l2_norm(), np.finfo(float).tiny)
    return (u - v).l2_norm() / den
