"""Quaternionic matrices as right linear operators on ``H^n``.

Linear algebra happens in the complex adjoint embedding: writing every
quaternion as ``a + b e2`` with ``a, b`` in ``C_{e1}``, a matrix
``T = A + B e2`` maps to the ``2n x 2n`` complex matrix::

    chi(T) = [[ A,        B     ],
              [-conj(B),  conj(A)]]

and a vector ``x = x1 + x2 e2`` to ``phi(x) = [x1; -conj(x2)]``. ``chi`` is an
injective algebra homomorphism with ``phi(T x) = chi(T) phi(x)``, and the
S-spectrum of ``T`` consists of the spheres through the eigenvalues of
``chi(T)``.
"""
import functools
import itertools
from typing import NamedTuple

import numpy as np
import opt_einsum as oe
import scipy.linalg as sla
from scipy.cluster.hierarchy import fcluster, linkage

from .errors import (CommutatorError, DimensionError, SingularError,
                     SSpectrumError)
from .quaternion import (E1, Quaternion, SlicePoint, as_qarray, qconj_array,
                         qinv_array, qmul_array)
from .utils import groupby


# smallest singular value of chi(Q_s(T)) below this times max(1, |T|^2)
# means s is in the S-spectrum
INVERTIBILITY_RTOL = 1e-10

# commutators below this times |T|^2 count as vanishing
COMMUTING_RTOL = 1e-12

# eigenvalues of chi(T) closer than this (in (u, v)) share a sphere
SPHERE_MERGE_ATOL = 1e-8


# ------------------------- complex adjoint embedding ----------------------- #

def complex_adjoint(entries):
    """Complex adjoint matrix ``chi(T)`` of a quaternion array ``(..., n, m,
    4)``, of shape ``(..., 2n, 2m)``.
    """
    entries = np.asarray(entries, dtype=float)
    A = entries[..., 0] + 1j * entries[..., 1]
    B = entries[..., 2] + 1j * entries[..., 3]
    top = np.concatenate([A, B], axis=-1)
    bottom = np.concatenate([-B.conj(), A.conj()], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def complex_adjoint_inverse(M):
    """Recover the quaternion entries ``(..., n, m, 4)`` from a (possibly
    numerically perturbed) complex adjoint matrix, projecting onto the
    quaternionic structure.
    """
    M = np.asarray(M)
    n, m = M.shape[-2] // 2, M.shape[-1] // 2
    A = 0.5 * (M[..., :n, :m] + M[..., n:, m:].conj())
    B = 0.5 * (M[..., :n, m:] - M[..., n:, :m].conj())
    return np.stack([A.real, A.imag, B.real, B.imag], axis=-1)


def embed_vector(v):
    """``phi(x) = [x1; -conj(x2)]`` for a quaternion vector ``(n, 4)``.
    """
    v = np.asarray(v, dtype=float)
    x1 = v[..., 0] + 1j * v[..., 1]
    x2 = v[..., 2] + 1j * v[..., 3]
    return np.concatenate([x1, -x2.conj()], axis=-1)


def unembed_vector(y):
    y = np.asarray(y)
    n = y.shape[-1] // 2
    x1, x2 = y[..., :n], -y[..., n:].conj()
    return np.stack([x1.real, x1.imag, x2.real, x2.imag], axis=-1)


def scalar_block(q):
    """The ``2 x 2`` complex block of quaternion(s) ``q``, shape ``(..., 2,
    2)``.
    """
    return complex_adjoint(as_qarray(q)[..., None, None, :])


def scalar_matrix(q, n):
    """``chi(q I_n)``, the embedding of the scalar operator ``v -> q v``.
    """
    return np.kron(scalar_block(q), np.eye(n))


def times_scalar(M, q):
    """``M chi(q_k I)`` for a stack ``M`` of embedded matrices ``(K, 2n,
    2n)`` and quaternions ``q`` of shape ``(K, 4)``, without forming the
    Kronecker products.
    """
    K, n2 = M.shape[0], M.shape[-1]
    n = n2 // 2
    out = oe.contract('kaicj,kcb->kaibj', M.reshape(K, 2, n, 2, n),
                      scalar_block(q))
    return out.reshape(K, n2, n2)


def scalar_times(q, M):
    """``chi(q_k I) M`` for stacks as in :func:`times_scalar`.
    """
    K, n2 = M.shape[0], M.shape[-1]
    n = n2 // 2
    out = oe.contract('kac,kcibj->kaibj', scalar_block(q),
                      M.reshape(K, 2, n, 2, n))
    return out.reshape(K, n2, n2)


# ------------------------------ the operator ------------------------------- #

class QMatrixOperator:
    """A dense quaternionic ``n x n`` matrix ``T = T0 + T1 e1 + T2 e2 + T3
    e3`` acting on column vectors in ``H^n`` by ``(T v)_i = sum_j T_ij v_j``.

    Parameters
    ----------
    entries : array_like
        Real array of shape ``(n, n, 4)``.

    Examples
    --------

        >>> T = QMatrixOperator.diag([Quaternion(0, 1), 2.0])
        >>> T.n
        2
        >>> s_spectrum(T)
        [SpectralSphere(u=0.0, v=1.0, mult=1), SpectralSphere(u=2.0, v=0.0, mult=1)]

    """

    __slots__ = ('entries', '_chi', '_commuting', '_norm')

    # let ``ndarray * op`` fall through to __rmul__
    __array_ufunc__ = None

    def __init__(self, entries):
        entries = np.array(entries, dtype=float)
        if (entries.ndim != 3 or entries.shape[0] != entries.shape[1] or
                entries.shape[2] != 4):
            raise DimensionError(
                f"Expected quaternion entries of shape (n, n, 4), got "
                f"{entries.shape}.")
        entries.setflags(write=False)
        self.entries = entries
        self._chi = None
        self._commuting = None
        self._norm = None

    # constructors

    @classmethod
    def from_components(cls, T0, T1=None, T2=None, T3=None):
        T0 = np.asarray(T0, dtype=float)
        comps = [T0] + [np.zeros_like(T0) if Ti is None else
                        np.asarray(Ti, dtype=float) for Ti in (T1, T2, T3)]
        return cls(np.stack(comps, axis=-1))

    @classmethod
    def from_complex_adjoint(cls, M):
        return cls(complex_adjoint_inverse(M))

    @classmethod
    def identity(cls, n):
        return cls.from_components(np.eye(n))

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros((n, n, 4)))

    @classmethod
    def diag(cls, values):
        values = [as_qarray(q) for q in values]
        entries = np.zeros((len(values), len(values), 4))
        for i, q in enumerate(values):
            entries[i, i] = q
        return cls(entries)

    @classmethod
    def scalar(cls, q, n):
        """The operator ``v -> q v`` (left multiplication by ``q``).
        """
        return cls(np.eye(n)[..., None] * as_qarray(q))

    # properties

    @property
    def n(self):
        return self.entries.shape[0]

    @property
    def components(self):
        """The real matrices ``(T0, T1, T2, T3)``.
        """
        return tuple(self.entries[..., i] for i in range(4))

    @property
    def complex_adjoint(self):
        if self._chi is None:
            self._chi = complex_adjoint(self.entries)
            self._chi.setflags(write=False)
        return self._chi

    chi = complex_adjoint

    def op_norm(self):
        """Operator norm on ``H^n``, equal to the spectral norm of the
        embedding.
        """
        if self._norm is None:
            self._norm = float(np.linalg.norm(self.complex_adjoint, 2))
        return self._norm

    def commutator_norm(self):
        """Largest spectral norm of the six component commutators ``[Ti,
        Tj]``.
        """
        comps = self.components
        return max(np.linalg.norm(comps[i] @ comps[j] - comps[j] @ comps[i], 2)
                   for i, j in itertools.combinations(range(4), 2))

    @property
    def commuting(self):
        if self._commuting is None:
            scale = self.op_norm()**2
            self._commuting = bool(
                self.commutator_norm() <= COMMUTING_RTOL * max(scale, 1e-300))
        return self._commuting

    def component_conj(self):
        """``T0 - T1 e1 - T2 e2 - T3 e3`` (no transposition).
        """
        return QMatrixOperator(qconj_array(self.entries))

    # algebra

    def __matmul__(self, other):
        if isinstance(other, QMatrixOperator):
            if other.n != self.n:
                raise DimensionError(f"Cannot compose {self.n}x{self.n} with "
                                     f"{other.n}x{other.n} operators.")
            prod = qmul_array(self.entries[:, :, None, :],
                              other.entries[None, :, :, :])
            return QMatrixOperator(prod.sum(axis=1))
        return qmat_apply(self, other)

    def __add__(self, other):
        return QMatrixOperator(self.entries + _entries_of(other, self.n))

    def __sub__(self, other):
        return QMatrixOperator(self.entries - _entries_of(other, self.n))

    def __neg__(self):
        return QMatrixOperator(-self.entries)

    def __mul__(self, c):
        """``T c``: right multiplication by a real or quaternion scalar,
        i.e. composition with ``v -> c v``.
        """
        return QMatrixOperator(qmul_array(self.entries, as_qarray(c)))

    def __rmul__(self, c):
        """``c T``: composition of ``v -> c v`` after ``T``.
        """
        return QMatrixOperator(qmul_array(as_qarray(c), self.entries))

    def __truediv__(self, c):
        return QMatrixOperator(self.entries / float(c))

    def __pow__(self, k):
        if k < 0:
            return self.inverse()**(-k)
        out = QMatrixOperator.identity(self.n)
        for _ in range(int(k)):
            out = out @ self
        return out

    def inverse(self):
        try:
            M = sla.inv(self.complex_adjoint)
        except (np.linalg.LinAlgError, sla.LinAlgError):
            raise SingularError("Operator is singular.")
        if not np.all(np.isfinite(M)):
            raise SingularError("Operator is singular.")
        return QMatrixOperator.from_complex_adjoint(M)

    def allclose(self, other, rtol=1e-9, atol=1e-12):
        return bool(np.allclose(self.entries, _entries_of(other, self.n),
                                rtol=rtol, atol=atol))

    def distance(self, other):
        """Max-norm distance between entries.
        """
        return float(np.max(np.abs(self.entries - _entries_of(other, self.n))))

    def max_norm(self):
        return float(np.max(np.abs(self.entries))) if self.n else 0.0

    def __repr__(self):
        return f"QMatrixOperator(n={self.n}, commuting={self.commuting})"


def _entries_of(x, n):
    if isinstance(x, QMatrixOperator):
        return x.entries
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        # a real scalar stands for a multiple of the identity
        return np.eye(n)[..., None] * np.array([float(x), 0, 0, 0])
    return x


def as_operator(T):
    return T if isinstance(T, QMatrixOperator) else QMatrixOperator(T)


# ------------------------------ operations --------------------------------- #

def qmat_apply(T, v):
    """Matrix-vector product ``(T v)_i = sum_j T_ij v_j`` with quaternion
    entries multiplied on the left of the vector entries.

    Parameters
    ----------
    T : QMatrixOperator
    v : array_like
        Quaternion vector of shape ``(n, 4)``.

    Returns
    -------
    numpy.ndarray of shape (n, 4)
    """
    T = as_operator(T)
    v = np.asarray(v, dtype=float)
    if v.shape != (T.n, 4):
        raise DimensionError(f"Expected a vector of shape ({T.n}, 4), got "
                             f"{v.shape}.")
    return qmul_array(T.entries, v[None, :, :]).sum(axis=1)


def _q_matrix(chi, chi2, s):
    s = as_qarray(s)
    n2 = chi.shape[-1]
    return chi2 - 2.0 * s[0] * chi + float(np.sum(s * s)) * np.eye(n2)


@functools.lru_cache(2**8)
def _chi_squared(T):
    chi = T.complex_adjoint
    return chi @ chi


def _scale(T):
    return max(1.0, T.op_norm()**2)


def min_singular_value(T, s):
    """Smallest singular value of ``chi(Q_s(T))``.
    """
    T = as_operator(T)
    Q = _q_matrix(T.complex_adjoint, _chi_squared(T), s)
    return float(sla.svdvals(Q).min())


def _checked_inverse(Q, scale, what, s):
    smin = sla.svdvals(Q).min()
    if smin <= INVERTIBILITY_RTOL * scale:
        raise SSpectrumError(
            f"{what} is not invertible at s = {Quaternion.coerce(s)} "
            f"(smallest singular value {smin:.3e}).")
    return sla.solve(Q, np.eye(Q.shape[0]))


def pseudo_resolvent(T, s):
    """``Q_s(T)^{-1}`` with ``Q_s(T) = T^2 - 2 s0 T + |s|^2 I``.

    Depends on ``s`` only through ``s0`` and ``|s|``.

    Raises
    ------
    SSpectrumError
        If ``s`` lies (numerically) in the S-spectrum of ``T``.
    """
    T = as_operator(T)
    Q = _q_matrix(T.complex_adjoint, _chi_squared(T), s)
    return QMatrixOperator.from_complex_adjoint(
        _checked_inverse(Q, _scale(T), 'Q_s(T)', s))


def _resolvents_embedded(T, s, side):
    T = as_operator(T)
    s = as_qarray(s)
    chi = T.complex_adjoint
    Qinv = _checked_inverse(_q_matrix(chi, _chi_squared(T), s), _scale(T),
                            'Q_s(T)', s)
    sbar = scalar_matrix(qconj_array(s), T.n)
    if side == 'left':
        return Qinv @ sbar - chi @ Qinv
    return -(chi - sbar) @ Qinv


def s_resolvent_left(T, s):
    """``S_L^{-1}(s, T) = Q_s(T)^{-1} conj(s) - T Q_s(T)^{-1}``.
    """
    return QMatrixOperator.from_complex_adjoint(
        _resolvents_embedded(T, s, 'left'))


def s_resolvent_right(T, s):
    """``S_R^{-1}(s, T) = -(T - conj(s) I) Q_s(T)^{-1}``.
    """
    return QMatrixOperator.from_complex_adjoint(
        _resolvents_embedded(T, s, 'right'))


def s_resolvents_batch(T, s, side='left'):
    """Embedded S-resolvents for a stack of points ``s`` of shape ``(K,
    4)``, returned as a ``(K, 2n, 2n)`` complex array. No invertibility
    check is made; callers guarantee the points stay off the spectrum.
    """
    T = as_operator(T)
    s = np.atleast_2d(as_qarray(s))
    chi, chi2 = T.complex_adjoint, _chi_squared(T)
    n2 = chi.shape[-1]
    Q = (chi2[None] - 2.0 * s[:, 0, None, None] * chi[None] +
         np.sum(s * s, axis=-1)[:, None, None] * np.eye(n2)[None])
    Qinv = np.linalg.solve(Q, np.broadcast_to(np.eye(n2), Q.shape))
    sbar = qconj_array(s)
    if side == 'left':
        return times_scalar(Qinv, sbar) - chi[None] @ Qinv
    return scalar_times(sbar, Qinv) - chi[None] @ Qinv


def real_resolvents_batch(T, t):
    """``(t_k I + T)^{-1}`` in the embedding for real ``t`` of shape ``(K,)``.
    """
    T = as_operator(T)
    chi = T.complex_adjoint
    n2 = chi.shape[-1]
    A = chi[None] + np.asarray(t, dtype=float)[:, None, None] * np.eye(n2)
    return np.linalg.solve(A, np.broadcast_to(np.eye(n2), A.shape))


class SpectralSphere(NamedTuple):
    """A sphere ``[u + I v]`` of the S-spectrum with its multiplicity.
    """
    u: float
    v: float
    mult: int = 1

    def point(self, axis=E1):
        return SlicePoint(self.u, self.v, Quaternion.coerce(axis))

    @property
    def complex(self):
        return complex(self.u, self.v)


def spheres_from_eigenvalues(eigs, atol=SPHERE_MERGE_ATOL):
    """Merge eigenvalues of a complex adjoint matrix into spheres, each
    reported once with ``v >= 0`` and half the embedding multiplicity.
    """
    eigs = np.asarray(eigs, dtype=complex)
    pts = np.stack([eigs.real, np.abs(eigs.imag)], axis=-1)
    if len(pts) == 1:
        labels = [1]
    else:
        labels = fcluster(linkage(pts, method='single'), t=atol,
                          criterion='distance')
    groups = groupby(lambda i: labels[i], range(len(pts)))
    spheres = []
    for members in groups.values():
        u, v = pts[members].mean(axis=0)
        spheres.append(SpectralSphere(float(u), float(v),
                                      max(1, round(len(members) / 2))))
    return sorted(spheres)


def s_spectrum(T):
    """The S-spectrum of ``T`` as a sorted list of :class:`SpectralSphere`.

    Computed from one dense eigendecomposition of the complex adjoint
    matrix, whose eigenvalues come in conjugate pairs ``u +- iv``.
    """
    T = as_operator(T)
    return spheres_from_eigenvalues(sla.eigvals(T.complex_adjoint))


def commuting_pseudo_resolvent(T, s):
    """``Q_{c,s}(T)^{-1}`` with ``Q_{c,s}(T) = s^2 I - 2 s T0 + T conj(T)``,
    for operators with commuting components.

    Raises
    ------
    CommutatorError
        If the components of ``T`` do not commute.
    SSpectrumError
        If ``Q_{c,s}(T)`` is not invertible.
    """
    T = as_operator(T)
    if not T.commuting:
        raise CommutatorError(
            "Components do not commute (max commutator norm "
            f"{T.commutator_norm():.3e}).")
    s = as_qarray(s)
    n = T.n
    T0 = QMatrixOperator.from_components(T.components[0])
    Qc = (QMatrixOperator.scalar(qmul_array(s, s), n) - (2.0 * s) * T0 +
          T @ T.component_conj())
    return QMatrixOperator.from_complex_adjoint(
        _checked_inverse(Qc.complex_adjoint, _scale(T), 'Q_{c,s}(T)', s))


def s_resolvent_left_commuting(T, s):
    """``S_L^{-1}(s, T) = (s I - conj(T)) Q_{c,s}(T)^{-1}`` for commuting
    components.
    """
    T = as_operator(T)
    Qc_inv = commuting_pseudo_resolvent(T, s)
    return (QMatrixOperator.scalar(s, T.n) - T.component_conj()) @ Qc_inv


def s_resolvent_equation_residual(T, s, p):
    """Relative residual of the S-resolvent equation::

        S_R(s) S_L(p) = [(S_R(s) - S_L(p)) p - conj(s) (S_R(s) - S_L(p))]
                        (p^2 - 2 s0 p + |s|^2)^{-1}

    for ``s`` and ``p`` in the S-resolvent set with ``s`` not in ``[p]``.
    """
    T = as_operator(T)
    s, p = as_qarray(s), as_qarray(p)
    SR, SL = s_resolvent_right(T, s), s_resolvent_left(T, p)
    lhs = SR @ SL
    D = SR - SL
    kq = qmul_array(p, p) - 2.0 * s[0] * p
    kq[0] += np.sum(s * s)
    rhs = (D * p - qconj_array(s) * D) * qinv_array(kq)
    return lhs.distance(rhs) / max(1.0, lhs.max_norm())


def s_resolvent_equation_residual_alt(T, s, p):
    """Relative residual of the reformulated S-resolvent equation::

        S_R(s) S_L(p) = (s^2 - 2 p0 s + |p|^2)^{-1}
                        [(S_R(s) - S_L(p)) conj(p) - s (S_R(s) - S_L(p))]
    """
    T = as_operator(T)
    s, p = as_qarray(s), as_qarray(p)
    SR, SL = s_resolvent_right(T, s), s_resolvent_left(T, p)
    lhs = SR @ SL
    D = SR - SL
    kq = qmul_array(s, s) - 2.0 * p[0] * s
    kq[0] += np.sum(p * p)
    rhs = qinv_array(kq) * (D * qconj_array(p) - s * D)
    return lhs.distance(rhs) / max(1.0, lhs.max_norm())
