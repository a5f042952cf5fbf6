"""Slice hyperholomorphic functions.

A left slice function is stored through its restriction to the upper half
plane of a slice, ``f(u + I v) = alpha(u, v) + I beta(u, v)``, with
``alpha``, ``beta`` quaternion valued. Only points with ``v >= 0`` are ever
sampled; values below the real axis follow from the compatibility condition
``alpha(u, -v) = alpha(u, v)``, ``beta(u, -v) = -beta(u, v)``.

Intrinsic functions (real valued ``alpha``, ``beta``) are given by a single
holomorphic function ``fn(z) = alpha + i beta`` of a complex variable.
"""
import functools

import numpy as np

from .domain import EVERYWHERE, SLIT_PLANE, Everywhere, Punctured
from .errors import DomainError, SingularError
from .quaternion import (
    Quaternion,
    as_qarray,
    complex_to_slice,
    qabs_array,
    qconj_array,
    qinv_array,
    qmul_array,
    slice_parts,
)


# |Q_s(p)| below this times max(1, |p|^2) means p lies on the sphere [s]
KERNEL_SINGULAR_RTOL = 1e-13


def _real_to_q(a):
    """Real array -> quaternion array with zero vector part.
    """
    a = np.asarray(a, dtype=float)
    out = np.zeros(a.shape + (4,))
    out[..., 0] = a
    return out


class SliceFunction:
    """Common machinery of left and right slice functions.

    Parameters
    ----------
    alpha, beta : callable
        Maps from complex arrays ``z`` (with ``Im z >= 0``) to quaternion
        arrays ``z.shape + (4,)``.
    domain : Region, optional
        Axially symmetric region on which the function is defined.
    name : str, optional
        Label used in reprs and reports.
    """

    __slots__ = ('_alpha', '_beta', 'domain', 'name')

    side = None

    def __init__(self, alpha, beta, domain=EVERYWHERE, name=None):
        self._alpha = alpha
        self._beta = beta
        self.domain = domain if domain is not None else EVERYWHERE
        self.name = name or 'f'

    def components(self, z, check=True):
        """Return ``(alpha, beta)`` at complex points ``z`` of any sign of
        ``Im z``, extending by the compatibility condition.
        """
        z = np.asarray(z, dtype=complex)
        if check:
            self.check_domain(z)
        zr = z.real + 1j * np.abs(z.imag)
        a = np.asarray(self._alpha(zr), dtype=float)
        b = np.asarray(self._beta(zr), dtype=float)
        b = np.where((z.imag < 0.0)[..., None], -b, b)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise DomainError(f"{self.name} is not finite at some of the "
                              "requested points.")
        return a, b

    def check_domain(self, z):
        if isinstance(self.domain, Everywhere):
            return
        bad = ~np.asarray(self.domain.contains(z))
        if np.any(bad):
            raise DomainError(
                f"{np.asarray(z)[bad].ravel()[0]} (slice representative) lies "
                f"outside the domain {self.domain!r} of {self.name}.")

    @staticmethod
    def _combine(axis, a, b):
        raise NotImplementedError

    def on_slice(self, z, axis, check=True):
        """Evaluate at the points ``Re z + axis * Im z`` of the slice plane
        spanned by the unit imaginary ``axis``.
        """
        z = np.asarray(z, dtype=complex)
        a, b = self.components(z, check=check)
        ax = np.broadcast_to(as_qarray(axis), z.shape + (4,))
        return self._combine(ax, a, b)

    def evaluate(self, p, check=True):
        """Evaluate at quaternion(s) ``p``, returning an array ``(..., 4)``.
        """
        u, v, axis = slice_parts(as_qarray(p))
        a, b = self.components(u + 1j * v, check=check)
        return self._combine(axis, a, b)

    def __call__(self, p):
        p = as_qarray(p)
        out = self.evaluate(p)
        if out.ndim == 1:
            return Quaternion.from_array(out)
        return out

    def __repr__(self):
        return (f"{self.__class__.__name__}(name={self.name!r}, "
                f"domain={self.domain!r})")


class LeftSliceFunction(SliceFunction):
    """``f(p) = alpha(p0, p1) + I_p beta(p0, p1)``.
    """

    __slots__ = ()

    side = 'left'

    @staticmethod
    def _combine(axis, a, b):
        return a + qmul_array(axis, b)

    def __add__(self, other):
        return _add(self, other, LeftSliceFunction)

    def __sub__(self, other):
        return _add(self, other.scale(-1.0), LeftSliceFunction)

    def scale(self, c):
        """``f * c`` for a quaternion constant ``c`` on the right.
        """
        c = as_qarray(c)
        return LeftSliceFunction(
            lambda z: qmul_array(self._alpha(z), c),
            lambda z: qmul_array(self._beta(z), c),
            domain=self.domain, name=f"({self.name})*c")


class RightSliceFunction(SliceFunction):
    """``f(p) = alpha(p0, p1) + beta(p0, p1) I_p``.
    """

    __slots__ = ()

    side = 'right'

    @staticmethod
    def _combine(axis, a, b):
        return a + qmul_array(b, axis)

    def __add__(self, other):
        return _add(self, other, RightSliceFunction)

    def scale(self, c):
        """``c * f`` for a quaternion constant ``c`` on the left.
        """
        c = as_qarray(c)
        return RightSliceFunction(
            lambda z: qmul_array(c, self._alpha(z)),
            lambda z: qmul_array(c, self._beta(z)),
            domain=self.domain, name=f"c*({self.name})")


def _add(f, g, cls):
    return cls(lambda z: f._alpha(z) + g._alpha(z),
               lambda z: f._beta(z) + g._beta(z),
               domain=f.domain & g.domain, name=f"{f.name}+{g.name}")


class IntrinsicSliceFunction(LeftSliceFunction):
    """An intrinsic slice function, given by a holomorphic ``fn`` on the
    complex plane with ``fn(conj z) = conj fn(z)``. Intrinsic functions are
    both left and right slice hyperholomorphic.

    Examples
    --------

        >>> sq = IntrinsicSliceFunction(lambda z: z**2, name='s^2')
        >>> sq(Quaternion(0, 0, 1))
        Quaternion(w=-1.0, x=0.0, y=0.0, z=0.0)

    """

    __slots__ = ('fn',)

    def __init__(self, fn, domain=EVERYWHERE, name=None):
        self.fn = fn
        super().__init__(
            lambda z: _real_to_q(np.real(self.fn(z))),
            lambda z: _real_to_q(np.imag(self.fn(z))),
            domain=domain, name=name,
        )

    def complex_values(self, z, check=True):
        """Values of the restriction to ``C_i``, ``alpha + i beta``.
        """
        z = np.asarray(z, dtype=complex)
        if check:
            self.check_domain(z)
        zr = z.real + 1j * np.abs(z.imag)
        w = np.asarray(self.fn(zr), dtype=complex)
        w = np.where(z.imag < 0.0, np.conj(w), w)
        if not np.all(np.isfinite(w)):
            raise DomainError(f"{self.name} is not finite at some of the "
                              "requested points.")
        return w

    def components(self, z, check=True):
        w = self.complex_values(z, check=check)
        return _real_to_q(w.real), _real_to_q(w.imag)

    def as_right(self):
        return RightSliceFunction(self._alpha, self._beta,
                                  domain=self.domain, name=self.name)

    def _binary(self, other, op, sym):
        if not isinstance(other, IntrinsicSliceFunction):
            other = constant(float(other))
        return IntrinsicSliceFunction(
            lambda z: op(self.fn(z), other.fn(z)),
            domain=self.domain & other.domain,
            name=f"({self.name}{sym}{other.name})")

    def __add__(self, other):
        if isinstance(other, SliceFunction) and not isinstance(
                other, IntrinsicSliceFunction):
            return super().__add__(other)
        return self._binary(other, np.add, '+')

    def __radd__(self, other):
        return self + other

    def __sub__(self, other):
        if isinstance(other, SliceFunction) and not isinstance(
                other, IntrinsicSliceFunction):
            return super().__sub__(other)
        return self._binary(other, np.subtract, '-')

    def __rsub__(self, other):
        return constant(float(other))._binary(self, np.subtract, '-')

    def __mul__(self, other):
        return self._binary(other, np.multiply, '*')

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        return self._binary(other, np.divide, '/')

    def __neg__(self):
        return IntrinsicSliceFunction(lambda z: -self.fn(z),
                                      domain=self.domain, name=f"-{self.name}")

    def compose(self, inner):
        """``self o inner`` for an intrinsic ``inner``; the caller is
        responsible for ``inner`` mapping into ``self.domain``.
        """
        return IntrinsicSliceFunction(
            lambda z: self.complex_values(inner.fn(z), check=False),
            domain=inner.domain, name=f"{self.name}({inner.name})")


# ------------------------------ constructors ------------------------------- #

def identity():
    return IntrinsicSliceFunction(lambda z: z, name='s')


def constant(c):
    """The constant function ``c``: intrinsic for real ``c``, otherwise the
    left slice function ``alpha = c, beta = 0``.
    """
    c = as_qarray(c)
    if np.all(c[1:] == 0.0):
        c0 = float(c[0])
        return IntrinsicSliceFunction(
            lambda z: np.full(np.shape(z), c0, dtype=complex), name=repr(c0))
    return LeftSliceFunction(
        lambda z: np.broadcast_to(c, np.shape(z) + (4,)),
        lambda z: np.zeros(np.shape(z) + (4,)),
        name=str(Quaternion.from_array(c)))


def polynomial(coeffs):
    """Intrinsic polynomial ``sum_k coeffs[k] s**k`` with real coefficients
    (lowest order first).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    return IntrinsicSliceFunction(
        lambda z: np.polynomial.polynomial.polyval(z, coeffs),
        name=f"poly{coeffs.tolist()}")


def quadratic(a):
    """``Q_a(s) = s^2 - 2 Re(a) s + |a|^2``, the symmetrisation of
    ``s - a``.
    """
    a = as_qarray(a)
    return polynomial([float(np.sum(a * a)), -2.0 * float(a[0]), 1.0])


def power(alpha):
    """``s**alpha`` on ``H`` minus ``(-inf, 0]``.
    """
    alpha = float(alpha)
    return IntrinsicSliceFunction(lambda z: np.power(z, alpha),
                                  domain=SLIT_PLANE, name=f"s^{alpha!r}")


def logarithm():
    return IntrinsicSliceFunction(np.log, domain=SLIT_PLANE, name='log(s)')


def exponential():
    return IntrinsicSliceFunction(np.exp, name='exp(s)')


def reciprocal():
    return IntrinsicSliceFunction(lambda z: 1.0 / z, domain=Punctured([0.0]),
                                  name='inv(s)')


def linear_left(a):
    """The left slice function ``s - a`` for a quaternion ``a``; intrinsic
    only when ``a`` is real.
    """
    return identity() - constant(a)


# ------------------------------ operations --------------------------------- #

def eval_left(f, p):
    """``alpha(p0, p1) + I_p beta(p0, p1)``.
    """
    return Quaternion.from_array(LeftSliceFunction._combine(
        *_axis_components(f, p)))


def eval_right(f, p):
    """``alpha(p0, p1) + beta(p0, p1) I_p``.
    """
    return Quaternion.from_array(RightSliceFunction._combine(
        *_axis_components(f, p)))


def _axis_components(f, p):
    u, v, axis = slice_parts(as_qarray(p))
    a, b = f.components(u + 1j * v)
    return axis, a, b


def _star(f, g, cls):
    def alpha(z):
        return (qmul_array(f._alpha(z), g._alpha(z)) -
                qmul_array(f._beta(z), g._beta(z)))

    def beta(z):
        return (qmul_array(f._alpha(z), g._beta(z)) +
                qmul_array(f._beta(z), g._alpha(z)))

    return cls(alpha, beta, domain=f.domain & g.domain,
               name=f"{f.name}*{g.name}")


def star_left(f, g):
    """The left slice product ``(alpha gamma - beta delta) + I (alpha delta +
    beta gamma)``. Coincides with the pointwise product if ``f`` is
    intrinsic.
    """
    if isinstance(f, IntrinsicSliceFunction) and isinstance(
            g, IntrinsicSliceFunction):
        return f * g
    return _star(f, g, LeftSliceFunction)


def star_right(f, g):
    """The right slice product ``(alpha gamma - beta delta) + (alpha delta +
    beta gamma) I``.
    """
    if isinstance(f, IntrinsicSliceFunction) and isinstance(
            g, IntrinsicSliceFunction):
        return f * g
    return _star(f, g, RightSliceFunction)


def conj_sym(f):
    """Slice conjugate ``f^c = conj(alpha) + I conj(beta)`` and
    symmetrisation ``f^s = f *_l f^c``, which is intrinsic.

    Returns
    -------
    fc : LeftSliceFunction
    fs : IntrinsicSliceFunction
    """
    fc = LeftSliceFunction(lambda z: qconj_array(f._alpha(z)),
                           lambda z: qconj_array(f._beta(z)),
                           domain=f.domain, name=f"{f.name}^c")

    def fs_fn(z):
        z = np.asarray(z, dtype=complex)
        a, b = f.components(z, check=False)
        re = np.sum(a * a, axis=-1) - np.sum(b * b, axis=-1)
        # Re(alpha conj(beta)) is the euclidean dot product of the components
        im = 2.0 * np.sum(a * b, axis=-1)
        return re + 1j * im

    fs = IntrinsicSliceFunction(fs_fn, domain=f.domain, name=f"{f.name}^s")
    return fc, fs


def star_inverse_left(f):
    """``f^{-*_l} = (f^s)^{-1} f^c``, defined where ``f^s`` does not vanish.
    """
    fc, fs = conj_sym(f)
    return star_left(constant(1.0) / fs, fc)


def zero_spheres(f, z, atol=1e-12):
    """Mask of the slice points ``z`` whose sphere contains a zero of ``f``
    (``f^s(z) = 0``).
    """
    _, fs = conj_sym(f)
    return np.abs(fs.complex_values(z, check=False)) <= atol


def _kernel_q(s, p):
    """``p^2 - 2 Re(s) p + |s|^2`` for quaternion arrays.
    """
    s, p = as_qarray(s), as_qarray(p)
    q = qmul_array(p, p) - 2.0 * s[..., :1] * p
    q[..., 0] += np.sum(s * s, axis=-1)
    scale = np.maximum(1.0, np.sum(p * p, axis=-1))
    if np.any(qabs_array(q) < KERNEL_SINGULAR_RTOL * scale):
        raise SingularError(
            "Cauchy kernel evaluated on the sphere of s: |Q_s(p)| = "
            f"{qabs_array(q).min():.3e}.")
    return q


def cauchy_kernel_left_array(s, p):
    s, p = as_qarray(s), as_qarray(p)
    return -qmul_array(qinv_array(_kernel_q(s, p)), p - qconj_array(s))


def cauchy_kernel_right_array(s, p):
    s, p = as_qarray(s), as_qarray(p)
    return -qmul_array(p - qconj_array(s), qinv_array(_kernel_q(s, p)))


def cauchy_kernel_left(s, p):
    """``S_L^{-1}(s, p) = -(p^2 - 2 Re(s) p + |s|^2)^{-1} (p - conj(s))``.

    Examples
    --------

        >>> cauchy_kernel_left(2.0, Quaternion(0, 1))
        Quaternion(w=0.4, x=0.2, y=0.0, z=0.0)

    """
    return Quaternion.from_array(cauchy_kernel_left_array(s, p))


def cauchy_kernel_right(s, p):
    """``S_R^{-1}(s, p) = -(p - conj(s)) (p^2 - 2 Re(s) p + |s|^2)^{-1}``.
    """
    return Quaternion.from_array(cauchy_kernel_right_array(s, p))


def cauchy_kernel_function(s):
    """The left Cauchy kernel ``p -> S_L^{-1}(s, p)`` as a left slice
    function of ``p`` (``s`` fixed).
    """
    s = as_qarray(s)
    s0, s2 = float(s[0]), float(np.sum(s * s))
    sbar = qconj_array(s)

    def q(z):
        return z * z - 2.0 * s0 * z + s2

    def alpha(z):
        g, h = -z / q(z), 1.0 / q(z)
        return _real_to_q(g.real) + h.real[..., None] * sbar

    def beta(z):
        g, h = -z / q(z), 1.0 / q(z)
        return _real_to_q(g.imag) + h.imag[..., None] * sbar

    u, v, _ = slice_parts(s)
    return LeftSliceFunction(alpha, beta, domain=Punctured([complex(u, v)]),
                             name='S_L^-1(s,.)')


def representation_formula(f, p, J):
    """Evaluate ``f`` at ``p`` from its values on the slice ``C_J`` only:
    ``(1 - I_p J) f(p_J) / 2 + (1 + I_p J) f(conj(p_J)) / 2``.
    """
    u, v, ip = slice_parts(as_qarray(p))
    J = as_qarray(J)
    z = np.asarray(u + 1j * v)
    f_plus = f.on_slice(z, J)
    f_minus = f.on_slice(np.conj(z), J)
    ij = qmul_array(ip, J)
    one = np.array([1.0, 0.0, 0.0, 0.0])
    out = 0.5 * (qmul_array(one - ij, f_plus) + qmul_array(one + ij, f_minus))
    return Quaternion.from_array(out)


def cr_residual(f, z, h=1e-5):
    """Cauchy-Riemann residual ``max |d_u alpha - d_v beta| + |d_v alpha +
    d_u beta|`` at interior slice points ``z`` (``Im z > h``), by central
    differences with step ``h``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))

    def ab(w):
        return f.components(w, check=False)

    (a_up, b_up), (a_um, b_um) = ab(z + h), ab(z - h)
    (a_vp, b_vp), (a_vm, b_vm) = ab(z + 1j * h), ab(z - 1j * h)
    da_du, db_du = (a_up - a_um) / (2 * h), (b_up - b_um) / (2 * h)
    da_dv, db_dv = (a_vp - a_vm) / (2 * h), (b_vp - b_vm) / (2 * h)
    res = qabs_array(da_du - db_dv) + qabs_array(da_dv + db_du)
    return float(np.max(res))


def cauchy_eval(f, p, contour):
    """Approximate ``f(p)`` by the slice Cauchy integral
    ``1/(2 pi) int S_L^{-1}(s, p) ds_I f(s)`` over ``contour``.

    Parameters
    ----------
    f : LeftSliceFunction
    p : quaternion
    contour : ContourSpec
        Contour in the slice plane of ``contour.axis``, which should enclose
        the sphere of ``p``.

    Returns
    -------
    Quaternion
    """
    z, dz = contour.nodes()
    axis = contour.axis
    s = complex_to_slice(z, axis)
    # ds_I = -I ds
    ds_i = complex_to_slice(-1j * dz, axis)
    kern = cauchy_kernel_left_array(s, np.broadcast_to(as_qarray(p), s.shape))
    integrand = qmul_array(kern, qmul_array(ds_i, f.on_slice(z, axis)))
    return Quaternion.from_array(integrand.sum(axis=0) / (2 * np.pi))


@functools.singledispatch
def as_slice_function(f):
    """Coerce numbers, quaternions and callables to slice functions.
    """
    if callable(f):
        return IntrinsicSliceFunction(f)
    return constant(f)


@as_slice_function.register(SliceFunction)
def _(f):
    return f


__all__ = (
    'SliceFunction', 'LeftSliceFunction', 'RightSliceFunction',
    'IntrinsicSliceFunction', 'identity', 'constant', 'polynomial',
    'quadratic', 'power', 'logarithm', 'exponential', 'reciprocal',
    'linear_left', 'eval_left', 'eval_right', 'star_left', 'star_right',
    'conj_sym', 'star_inverse_left', 'zero_spheres', 'cauchy_kernel_left',
    'cauchy_kernel_right', 'cauchy_kernel_function',
    'representation_formula', 'cr_residual', 'cauchy_eval',
    'as_slice_function',
)
