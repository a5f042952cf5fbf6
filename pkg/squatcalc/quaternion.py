"""Quaternion arithmetic, the slice decomposition ``p = u + I v`` and the
intrinsic scalar functions (``exp``, ``log``, real powers) that the rest of
the calculus is built on.

Two layers are provided: the immutable scalar :class:`Quaternion` and
vectorised functions acting on real arrays of shape ``(..., 4)`` holding the
components ``(w, x, y, z)`` of ``w + x e1 + y e2 + z e3``. The scalar layer
is a thin wrapper around the array layer.
"""
import re
import json
import functools
import numbers
from typing import NamedTuple

import numpy as np

from .errors import DomainError


# |Im s| <= CUT_GUARD * |s| with Re s < 0 counts as lying on (-inf, 0]
CUT_GUARD = 1e-14


# ----------------------------- array layer --------------------------------- #

def as_qarray(q):
    """Convert ``q`` (a :class:`Quaternion`, real number, sequence of four
    reals or array of shape ``(..., 4)``) to a float array ``(..., 4)``.
    """
    if isinstance(q, Quaternion):
        return np.array(q, dtype=float)
    q = np.asarray(q, dtype=float)
    if q.ndim == 0:
        return np.array([float(q), 0.0, 0.0, 0.0])
    if q.shape[-1] != 4:
        raise ValueError(f"Quaternion arrays need a trailing axis of size 4, "
                         f"got shape {q.shape}.")
    return q


def qmul_array(a, b):
    """Hamilton product of two broadcastable ``(..., 4)`` arrays.
    """
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack([
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ], axis=-1)


def qconj_array(a):
    return a * np.array([1.0, -1.0, -1.0, -1.0])


def qabs_array(a):
    return np.linalg.norm(a, axis=-1)


def qinv_array(a):
    n2 = np.sum(a * a, axis=-1)
    if np.any(n2 == 0.0):
        raise DomainError("Cannot invert the zero quaternion.")
    return qconj_array(a) / n2[..., None]


def slice_parts(a):
    """Split ``(..., 4)`` quaternions into ``(u, v, axis)`` with
    ``q = u + axis * v``, ``v >= 0`` and ``axis`` a unit imaginary
    quaternion. Real entries get the default axis ``e1``.
    """
    a = np.asarray(a, dtype=float)
    u = a[..., 0]
    vec = a[..., 1:]
    v = np.linalg.norm(vec, axis=-1)
    axis = np.zeros(a.shape, dtype=float)
    nz = v > 0.0
    axis[..., 1:] = np.where(nz[..., None],
                             vec / np.where(nz, v, 1.0)[..., None], 0.0)
    axis[..., 1] = np.where(nz, axis[..., 1], 1.0)
    return u, v, axis


def from_slice_parts(u, v, axis):
    """Inverse of :func:`slice_parts`: ``u + axis * v``.
    """
    out = np.asarray(axis, dtype=float) * np.asarray(v, dtype=float)[..., None]
    out[..., 0] = u
    return out


def on_cut(a):
    """Boolean mask of the quaternions lying on ``(-inf, 0]`` (guard band
    included).
    """
    u, v, _ = slice_parts(a)
    r = np.hypot(u, v)
    return (r == 0.0) | ((u < 0.0) & (v <= CUT_GUARD * r))


def qexp_array(a):
    u, v, axis = slice_parts(a)
    eu = np.exp(u)
    return from_slice_parts(eu * np.cos(v), eu * np.sin(v), axis)


def qlog_array(a):
    a = as_qarray(a)
    if np.any(on_cut(a)):
        raise DomainError(
            "The slice logarithm is undefined on (-inf, 0], got "
            f"{a[on_cut(a)][0].tolist()}.")
    u, v, axis = slice_parts(a)
    # equal to arccos(u / |s|) for v >= 0 but accurate near the real axis
    return from_slice_parts(np.log(np.hypot(u, v)), np.arctan2(v, u), axis)


def qpow_array(a, alpha):
    """Real power ``s**alpha = exp(alpha log s)`` of ``(..., 4)`` arrays.
    """
    return qexp_array(float(alpha) * qlog_array(a))


def complex_to_slice(z, axis):
    """Embed complex numbers ``z`` into the slice plane spanned by ``axis``.
    """
    z = np.asarray(z)
    return from_slice_parts(z.real, z.imag, np.broadcast_to(
        as_qarray(axis), z.shape + (4,)).copy())


@functools.lru_cache(1)
def _left_mul_tensor():
    basis = np.eye(4)
    return np.stack([qmul_array(basis[j], basis) for j in range(4)], axis=1)


def left_matrix(q):
    """The real 4x4 matrix ``L`` with ``L @ b == q * b`` for all ``b``.
    """
    return np.einsum('kji,j->ik', _left_mul_tensor(), as_qarray(q))


# ----------------------------- scalar layer -------------------------------- #

def _scalar_like(x):
    # operators and fields supply their own reflected products
    return isinstance(x, (numbers.Real, tuple, list, np.ndarray))


class Quaternion(NamedTuple):
    """An immutable quaternion ``w + x e1 + y e2 + z e3``.

    Examples
    --------

        >>> e1, e2 = Quaternion(0, 1), Quaternion(0, 0, 1)
        >>> e1 * e2
        Quaternion(w=0.0, x=0.0, y=0.0, z=1.0)

    """
    w: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a):
        return cls(*map(float, np.asarray(a, dtype=float)))

    @classmethod
    def coerce(cls, q):
        if isinstance(q, cls):
            return q
        return cls.from_array(as_qarray(q))

    @property
    def real(self):
        return self.w

    @property
    def vector(self):
        return (self.x, self.y, self.z)

    def conj(self):
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def __abs__(self):
        return float(np.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2))

    def inv(self):
        return Quaternion.from_array(qinv_array(as_qarray(self)))

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __add__(self, other):
        return Quaternion.from_array(as_qarray(self) + as_qarray(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Quaternion.from_array(as_qarray(self) - as_qarray(other))

    def __rsub__(self, other):
        return Quaternion.from_array(as_qarray(other) - as_qarray(self))

    def __mul__(self, other):
        if not _scalar_like(other):
            return NotImplemented
        return qmul(self, other)

    def __rmul__(self, other):
        if not _scalar_like(other):
            return NotImplemented
        return qmul(other, self)

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Quaternion.from_array(as_qarray(self) / other)
        return qmul(self, Quaternion.coerce(other).inv())

    def is_real(self):
        return self.x == self.y == self.z == 0.0

    def allclose(self, other, rtol=1e-12, atol=1e-14):
        return bool(np.allclose(as_qarray(self), as_qarray(other),
                                rtol=rtol, atol=atol))

    def __str__(self):
        return format_quaternion(self)


ONE = Quaternion(1.0)
E1 = Quaternion(0.0, 1.0)
E2 = Quaternion(0.0, 0.0, 1.0)
E3 = Quaternion(0.0, 0.0, 0.0, 1.0)


class SlicePoint(NamedTuple):
    """The slice decomposition ``q = u + axis * v`` with ``v >= 0``.
    """
    u: float
    v: float
    axis: Quaternion = E1

    def reconstruct(self):
        return slice_reconstruct(self)

    @property
    def complex(self):
        """The representative ``u + iv`` in the upper half plane.
        """
        return complex(self.u, self.v)


def qmul(a, b):
    """Hamilton product of two quaternions.
    """
    return Quaternion.from_array(qmul_array(as_qarray(a), as_qarray(b)))


def qconj(q):
    return Quaternion.coerce(q).conj()


def qabs(q):
    return abs(Quaternion.coerce(q))


def qinv(q):
    return Quaternion.coerce(q).inv()


def slice_decompose(q):
    """Decompose ``q`` as ``u + I v`` with ``v >= 0``.

    Examples
    --------

        >>> slice_decompose(Quaternion(1, 0, -2))
        SlicePoint(u=1.0, v=2.0, axis=Quaternion(w=0.0, x=0.0, y=-1.0, z=0.0))

    """
    u, v, axis = slice_parts(as_qarray(q))
    return SlicePoint(float(u), float(v), Quaternion.from_array(axis))


def slice_reconstruct(sp):
    return Quaternion.from_array(from_slice_parts(sp.u, sp.v, as_qarray(
        sp.axis)))


def qexp(q):
    return Quaternion.from_array(qexp_array(as_qarray(q)))


def qlog(s):
    """The slice logarithm ``ln|s| + I_s arccos(s0 / |s|)``, defined off
    ``(-inf, 0]``.
    """
    return Quaternion.from_array(qlog_array(as_qarray(s)))


def qpow(s, alpha):
    """The real power ``s**alpha = exp(alpha log s)`` for ``s`` off
    ``(-inf, 0]``.
    """
    return Quaternion.from_array(qpow_array(as_qarray(s), alpha))


# ------------------------------- text form --------------------------------- #

_NUM = r'(?:\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)'
_TERM = re.compile(rf'([+-]?)({_NUM})?\*?([ijk]?)')
_UNIT_INDEX = {'': 0, 'i': 1, 'j': 2, 'k': 3}


def parse_quaternion(text):
    """Parse ``'w+x i+y j+z k'`` (terms in any order, whitespace ignored) or
    a JSON array ``'[w, x, y, z]'``.

    Examples
    --------

        >>> parse_quaternion('1 - 2j + 0.5k')
        Quaternion(w=1.0, x=0.0, y=-2.0, z=0.5)
        >>> parse_quaternion('[0, 1, 0, 0]')
        Quaternion(w=0.0, x=1.0, y=0.0, z=0.0)

    """
    text = text.strip()
    if text.startswith('['):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid quaternion array {text!r}: {e}")
        if len(values) != 4:
            raise ValueError(f"Quaternion arrays need 4 entries, got "
                             f"{text!r}.")
        return Quaternion(*map(float, values))

    compact = re.sub(r'\s+', '', text)
    if not compact:
        raise ValueError("Empty quaternion literal.")

    comps = [0.0] * 4
    pos = 0
    while pos < len(compact):
        m = _TERM.match(compact, pos)
        if (m is None) or (m.end() == pos) or not (m.group(2) or m.group(3)):
            raise ValueError(f"Invalid quaternion literal {text!r}.")
        if pos > 0 and not m.group(1):
            raise ValueError(f"Missing sign between terms in {text!r}.")
        sign = -1.0 if m.group(1) == '-' else 1.0
        coeff = float(m.group(2)) if m.group(2) else 1.0
        comps[_UNIT_INDEX[m.group(3)]] += sign * coeff
        pos = m.end()
    return Quaternion(*comps)


def format_quaternion(q):
    w, x, y, z = Quaternion.coerce(q)
    return f"{w!r}{x:+.17g}i{y:+.17g}j{z:+.17g}k"
