"""The quaternionic nabla operator ``e1 d1 + e2 d2 + e3 d3`` on periodic
grids, and functions of it.

In the splitting ``v = a + J b`` (``a, b`` in ``C_I``, by default ``I = e1,
J = e2``) the Fourier transform turns nabla into multiplication by the
hermitian symbol::

    G(xi) = [[ -xi1,          xi3 - i xi2 ],
             [ xi3 + i xi2,   xi1         ]]

with ``trace G = 0``, ``det G = -|xi|^2`` and ``G^2 = |xi|^2``. The S-spectrum
of nabla is the real line, and the fractional power keeping only its
nonnegative part acts on each mode as ``|xi|^alpha P+`` with ``P+ = (1 +
G / |xi|) / 2``.
"""
import functools
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .field import SpectralField, _fftn, _ifftn, wavevectors
from .quadrature import (DEFAULT_QUAD, check_tail, half_line_rule,
                         monomial_integral)
from .quaternion import E1, E2, Quaternion, as_qarray, qmul_array


# ------------------------------- splittings -------------------------------- #

class Splitting(NamedTuple):
    """The decomposition ``H = C_I + J C_I`` for orthogonal unit imaginary
    ``I`` and ``J``, completed by ``K = I J``.
    """
    I: Quaternion = E1
    J: Quaternion = E2

    @classmethod
    def checked(cls, I=E1, J=E2):
        I, J = Quaternion.coerce(I), Quaternion.coerce(J)
        for name, q in (('I', I), ('J', J)):
            if abs(q.w) > 1e-12 or abs(abs(q) - 1.0) > 1e-12:
                raise DomainError(f"{name} must be a unit imaginary "
                                  f"quaternion, got {q}.")
        if abs(np.dot(I[1:], J[1:])) > 1e-12:
            raise DomainError(f"I={I} and J={J} are not orthogonal.")
        return cls(I, J)

    @property
    def K(self):
        return Quaternion.from_array(qmul_array(as_qarray(self.I),
                                                as_qarray(self.J)))

    @property
    def frame(self):
        """Rows are the vector parts of ``I, J, K``.
        """
        return np.array([self.I[1:], self.J[1:], self.K[1:]], dtype=float)

    @property
    def is_standard(self):
        return bool(np.array_equal(self.frame, np.eye(3)))

    def to_parts(self, values):
        """Complex parts ``(a, b)`` of ``v = a + J b``.
        """
        c = values[..., 1:] @ self.frame.T
        return (values[..., 0] + 1j * c[..., 0],
                c[..., 1] - 1j * c[..., 2])

    def from_parts(self, a, b):
        c = np.stack([a.imag, b.real, -b.imag], axis=-1)
        return np.concatenate([a.real[..., None], c @ self.frame], axis=-1)


STANDARD_SPLITTING = Splitting()


def _splitting(splitting):
    if splitting is None:
        return STANDARD_SPLITTING
    return Splitting.checked(*splitting)


def _split_hat(v, splitting):
    if splitting.is_standard:
        return v.splitting()
    a, b = splitting.to_parts(v.values)
    return _fftn(a), _fftn(b)


def _from_split_hat(a_hat, b_hat, box, splitting):
    if splitting.is_standard:
        return SpectralField.from_splitting(a_hat, b_hat, box)
    return SpectralField(splitting.from_parts(_ifftn(a_hat), _ifftn(b_hat)),
                         box)


def _apply_modes(M, a, b):
    return (M[..., 0, 0] * a + M[..., 0, 1] * b,
            M[..., 1, 0] * a + M[..., 1, 1] * b)


def _act(v, M, splitting):
    """Multiply every Fourier mode of ``v`` by the ``2 x 2`` matrix ``M``.
    """
    a, b = _apply_modes(M, *_split_hat(v, splitting))
    return _from_split_hat(a, b, v.box, splitting)


# ------------------------------- the symbol -------------------------------- #

def symbol(xi1, xi2, xi3):
    """The matrix ``G(xi)`` for broadcastable wavenumber arrays, shape
    ``(..., 2, 2)``.

    Examples
    --------

        >>> symbol(1.0, 0.0, 0.0).real
        array([[-1.,  0.],
               [ 0.,  1.]])

    """
    xi1, xi2, xi3 = np.broadcast_arrays(*map(np.asarray, (xi1, xi2, xi3)))
    G = np.empty(xi1.shape + (2, 2), dtype=complex)
    G[..., 0, 0] = -xi1
    G[..., 0, 1] = xi3 - 1j * xi2
    G[..., 1, 0] = xi3 + 1j * xi2
    G[..., 1, 1] = xi1
    return G


def _nu_power(nu, p):
    """``nu**p`` with the zero mode mapped to zero (unless ``p == 0``).
    """
    if p == 0:
        return np.ones_like(nu)
    out = np.zeros_like(nu)
    mask = nu > 0
    out[mask] = nu[mask]**p
    return out


class SymbolTable(NamedTuple):
    """The nabla symbol on a whole lattice of modes.
    """
    xi: tuple
    nu: np.ndarray
    G: np.ndarray

    def trace(self):
        return self.G[..., 0, 0] + self.G[..., 1, 1]

    def det(self):
        G = self.G
        return G[..., 0, 0] * G[..., 1, 1] - G[..., 0, 1] * G[..., 1, 0]

    def square_residual(self):
        """``max |G^2 - |xi|^2 Id|`` over all modes.
        """
        G2 = self.G @ self.G
        return float(np.max(np.abs(G2 - self.nu[..., None, None]**2 *
                                   np.eye(2))))

    def eigvalsh(self):
        return np.linalg.eigvalsh(self.G)

    def projectors(self):
        """Spectral projectors ``P+, P-`` onto the eigenvalues ``+|xi|`` and
        ``-|xi|``. The zero mode is assigned to ``P-``.
        """
        inv = _nu_power(self.nu, -1)[..., None, None]
        Id = np.eye(2)
        P_plus = 0.5 * (Id + inv * self.G)
        P_plus[self.nu == 0] = 0.0
        return P_plus, Id - P_plus


@functools.lru_cache(8)
def _symbol_table(dims, box, frame):
    xi, nu = wavevectors(dims, box)
    R = np.array(frame).reshape(3, 3)
    rxi = tuple(sum(R[m, l] * xi[l] for l in range(3)) for m in range(3))
    G = symbol(*rxi)
    G.setflags(write=False)
    return SymbolTable(rxi, nu, G)


def symbol_table(dims, box=None, splitting=None):
    """All per-mode symbols ``G(xi)`` of nabla on the grid ``dims`` with
    periods ``box``, expressed in ``splitting``.
    """
    if box is None:
        box = (2 * np.pi,) * 3
    splitting = _splitting(splitting)
    return _symbol_table(tuple(map(int, dims)), tuple(map(float, box)),
                         tuple(splitting.frame.ravel()))


def _table(v, splitting):
    return symbol_table(v.dims, v.box, splitting)


# ------------------------------- operators --------------------------------- #

def nabla_apply(v, splitting=None):
    """``(e1 d1 + e2 d2 + e3 d3) v`` by spectral differentiation.
    """
    splitting = _splitting(splitting)
    return _act(v, _table(v, splitting).G, splitting)


def _multiplier(v, m):
    """Multiply the componentwise transform of ``v`` by the real symbol
    ``m``.
    """
    return SpectralField.from_hat(v.hat() * m[..., None], v.box)


def laplacian(v):
    """``Delta v``, componentwise.
    """
    _, nu = v.wavevectors()
    return _multiplier(v, -nu**2)


def frac_laplacian(v, gamma):
    """``(-Delta)^gamma v``: multiplication of every mode by ``|xi|^(2
    gamma)``, with the zero mode annihilated for ``gamma != 0``.
    """
    _, nu = v.wavevectors()
    return _multiplier(v, _nu_power(nu, 2 * gamma))


def derivative(u, axis, box):
    """Spectral derivative of a real array ``u`` of shape ``(N1, N2, N3)``
    along ``axis``.
    """
    xi, _ = wavevectors(u.shape[:3], tuple(box))
    return _ifftn(1j * xi[axis] * _fftn(u)).real


def gradient(u, box):
    """``(d1 u, d2 u, d3 u)`` of a real array, stacked on the last axis.
    """
    uh = _fftn(u)
    xi, _ = wavevectors(u.shape[:3], tuple(box))
    return np.stack([_ifftn(1j * x * uh).real for x in xi], axis=-1)


def divergence(w, box):
    """``d1 w1 + d2 w2 + d3 w3`` for a real array of shape ``(N1, N2, N3,
    3)``.
    """
    return sum(derivative(w[..., l], l, box) for l in range(3))


# ------------------------------- s-spectrum -------------------------------- #

class NablaProbe(NamedTuple):
    invertible: bool
    min_distance: float
    nearest_nu: float


def s_spectrum_probe_nabla(dims, box, s, rtol=1e-12):
    """Check whether ``Q_{c,s}(nabla) = s^2 + Delta`` is invertible on the
    grid, i.e. whether ``s^2`` avoids every ``|xi|^2``.

    On a finite grid the S-spectrum is the discrete set of ``+-|xi|``, so a
    real ``s`` is only reported singular when it hits a lattice value.
    """
    s = as_qarray(s)
    if box is None:
        box = (2 * np.pi,) * 3
    _, nu = wavevectors(tuple(map(int, dims)), tuple(map(float, box)))
    s2 = qmul_array(s, s)
    nus = np.unique(nu)
    dist = np.sqrt((s2[0] - nus**2)**2 + np.sum(s2[1:]**2))
    i = int(np.argmin(dist))
    tol = rtol * max(1.0, float(nus[-1])**2)
    return NablaProbe(bool(dist[i] > tol), float(dist[i]), float(nus[i]))


# --------------------------- fractional powers ----------------------------- #

def _check_alpha(alpha, upper_closed=True):
    ok = 0.0 < alpha <= 1.0 if upper_closed else 0.0 < alpha < 1.0
    if not ok:
        rng = '(0, 1]' if upper_closed else '(0, 1)'
        raise DomainError(f"alpha must lie in {rng}, got {alpha}.")


def frac_nabla_closed(v, alpha, splitting=None):
    """The fractional power of nabla restricted to its nonnegative
    spectrum, in closed form::

        f_alpha(nabla) v = (-Delta)^(alpha/2 - 1) [(-Delta)^(1/2) + nabla]
                           nabla v / 2

    i.e. ``|xi|^alpha (Id + G / |xi|) / 2`` on each mode, zero on the zero
    mode.
    """
    _check_alpha(alpha)
    splitting = _splitting(splitting)
    tab = _table(v, splitting)
    M = (0.5 * _nu_power(tab.nu, alpha)[..., None, None] * np.eye(2) +
         0.5 * _nu_power(tab.nu, alpha - 1)[..., None, None] * tab.G)
    return _act(v, M, splitting)


def frac_nabla_measurable(v, alpha, splitting=None):
    """Same as :func:`frac_nabla_closed` but by diagonalising every symbol
    and applying ``t -> t^alpha`` to its positive eigenvalue only.
    """
    _check_alpha(alpha)
    splitting = _splitting(splitting)
    lam, V = np.linalg.eigh(_table(v, splitting).G)
    f = np.where(lam > 0, np.abs(lam)**alpha, 0.0)
    M = (V * f[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))
    return _act(v, M, splitting)


def nabla_kernels(t, xi, alpha):
    """The matrix integrands on the two halves ``s = -+ I t`` of the
    imaginary axis::

        K-(t) = t^(alpha-1) / (t^2 + |xi|^2) (G - t E) exp(-theta E) G
        K+(t) = t^(alpha-1) / (t^2 + |xi|^2) (G + t E) exp(+theta E) G

    with ``E = diag(i, -i)`` (left multiplication by ``I``) and ``theta =
    (alpha - 1) pi / 2``, such that ``f_alpha(G) = int_0^inf (K- + K+) dt /
    2 pi``. ``t`` has shape ``(K,)`` and the result ``(K, 2, 2)`` each.
    """
    t = np.asarray(t, dtype=float)
    G = symbol(*xi)
    nu2 = float(np.sum(np.square(xi)))
    theta = 0.5 * (alpha - 1) * np.pi
    E = np.diag([1j, -1j])
    ep = np.diag([np.exp(1j * theta), np.exp(-1j * theta)])
    em = ep.conj()
    c = (t**(alpha - 1) / (t**2 + nu2))[:, None, None]
    tE = t[:, None, None] * E
    return c * ((G - tE) @ em @ G), c * ((G + tE) @ ep @ G)


def _truncated_moments(nu, p, quad):
    """``int_0^inf t^p / (t^2 + nu^2) dt`` for every ``nu > 0``, on the log
    substituted half line rule with two-term tail corrections.
    """
    t, w, lo, hi = half_line_rule(quad, float(nu.min()), float(nu.max()))
    nu2 = nu[:, None]**2
    body = (t**p / (t**2 + nu2)) @ w
    nu2 = nu2[:, 0]
    head = (monomial_integral(p, 0.0, lo) / nu2 -
            monomial_integral(p + 2, 0.0, lo) / nu2**2)
    tail = (monomial_integral(p - 2, hi) -
            nu2 * monomial_integral(p - 4, hi))
    est = (monomial_integral(p + 4, 0.0, lo) / nu2**3 +
           nu2**2 * monomial_integral(p - 6, hi))
    total = body + head + tail
    return total, float(np.max(est / np.abs(total)))


def frac_nabla_quadrature(v, alpha, quad=DEFAULT_QUAD, splitting=None):
    """The fractional power of nabla as the S-resolvent integral along the
    imaginary axis of ``C_I``::

        f_alpha(nabla) v = 1 / (2 pi) int S_L^{-1}(s, nabla) ds_I
                           s^(alpha - 1) nabla v

    Each mode reduces to the integrals of :func:`nabla_kernels`, whose
    scalar parts are computed once per distinct ``|xi|``.

    Warns
    -----
    QuadratureWarning
        If the truncated tails exceed ``quad.tol``.
    """
    _check_alpha(alpha, upper_closed=False)
    splitting = _splitting(splitting)
    tab = _table(v, splitting)
    nu = tab.nu
    mask = nu > 0
    if not np.any(mask):
        return SpectralField.zeros(v.dims, v.box)

    nus, inverse = np.unique(nu[mask], return_inverse=True)
    m1, est1 = _truncated_moments(nus, alpha, quad)
    m0, est0 = _truncated_moments(nus, alpha - 1, quad)
    check_tail(max(est0, est1), quad, 'nabla kernel integrals')

    I1 = np.zeros_like(nu)
    I0 = np.zeros_like(nu)
    I1[mask] = m1[inverse.ravel()]
    I0[mask] = m0[inverse.ravel()]

    theta = 0.5 * (alpha - 1) * np.pi
    E = np.diag([1j, -1j])
    ep = np.diag([np.exp(1j * theta), np.exp(-1j * theta)])
    em = ep.conj()
    G = tab.G
    M = (I1[..., None, None] * (E @ (ep - em) @ G) +
         I0[..., None, None] * (G @ (ep + em) @ G)) / (2 * np.pi)
    return _act(v, M, splitting)


_FRAC_NABLA_METHODS = {
    'closed': frac_nabla_closed,
    'quadrature': frac_nabla_quadrature,
    'measurable': frac_nabla_measurable,
}


def frac_nabla(v, alpha, method='closed', **kwargs):
    """Dispatch to one of the ``'closed'``, ``'quadrature'`` or
    ``'measurable'`` routes.
    """
    try:
        fn = _FRAC_NABLA_METHODS[method]
    except KeyError:
        raise ValueError(f"Unknown method {method!r}, choose from "
                         f"{sorted(_FRAC_NABLA_METHODS)}.")
    return fn(v, alpha, **kwargs)


# -------------------------------- parts ------------------------------------ #

def scal_vec_split(w):
    """The scalar part (shape ``(N1, N2, N3)``) and the vector part (shape
    ``(N1, N2, N3, 3)``) of a field.
    """
    return np.array(w.scalar), np.array(w.vector)


def scal_vec_join(scal, vec, box=None):
    return SpectralField(np.concatenate([np.asarray(scal)[..., None],
                                         np.asarray(vec)], axis=-1), box)


def _require_real(v):
    if not v.is_real():
        raise DomainError("This identity holds for real (scalar) fields "
                          "only, got a field with a vector part.")


def div_vec(v, alpha):
    """``div Vec f_alpha(nabla) v`` as a real array.
    """
    _, vec = scal_vec_split(frac_nabla_closed(v, alpha))
    return divergence(vec, v.box)


def div_vec_identity(v, alpha):
    """Grid L2 norm of ``div Vec f_alpha(nabla) v + (-Delta)^((alpha+1)/2)
    v / 2`` for a real field ``v``, which vanishes identically.
    """
    _require_real(v)
    lhs = div_vec(v, alpha)
    rhs = -0.5 * frac_laplacian(v, 0.5 * (alpha + 1)).scalar
    return float(np.sqrt(np.sum((lhs - rhs)**2) * v.cell_volume))


def self_adjointness_residual(u, v, alpha, method='closed'):
    """``|<f u, v> - <u, f v>| / (|u| |v|)`` for ``f = f_alpha(nabla)``.
    """
    d = (frac_nabla(u, alpha, method).inner(v) -
         u.inner(frac_nabla(v, alpha, method)))
    return abs(d) / max(u.l2_norm() * v.l2_norm(), np.finfo(float).tiny)
