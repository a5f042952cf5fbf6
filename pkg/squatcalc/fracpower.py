"""Fractional powers ``T^alpha`` of quaternionic matrices whose S-spectrum
avoids ``(-inf, 0]``.

Four routes are provided and registered by name:

- ``'spectral'``: the S-functional calculus of ``s^alpha``, the reference,
- ``'balakrishnan'``: ``sin(alpha pi)/pi int t^(alpha-1) (t+T)^-1 T dt``,
  with the higher order kernel ``[T (t+T)^-1]^m`` for ``alpha >= 1``,
- ``'negative'``: ``T^-alpha = sin(alpha pi)/pi int t^-alpha (t+T)^-1 dt``,
- ``'komatsu'``, ``'komatsu2'``: the two split forms valid for ``alpha``
  in ``(-1, 1)``.

The half line integrals are evaluated with ``t = exp(u)`` and a composite
Gauss-Legendre rule, truncated to ``[eps lam_min, Lam lam_max]``; the
discarded tails are added back from two terms of the small and large ``t``
expansions of the integrand.
"""
from typing import NamedTuple

import numpy as np
import opt_einsum as oe
from scipy.special import gamma

from .calculus import s_funcalc_left
from .domain import SLIT_PLANE
from .errors import SectorError, SingularError
from .parallel import map_chunks
from .qmatrix import (
    QMatrixOperator,
    as_operator,
    s_resolvents_batch,
    s_spectrum,
)
from .quadrature import (
    DEFAULT_QUAD,
    check_tail,
    half_line_rule,
    log_rule,
    monomial_integral as mi,
    monomial_log_integral as mli,
)
from .slice import IntrinsicSliceFunction, power
from .utils import partition_all


# spectra with an angle above pi - SECTOR_MARGIN are refused
SECTOR_MARGIN = 1e-6

_CHUNK_NODES = 256


# ------------------------------ diagnostics -------------------------------- #

class SectorialReport(NamedTuple):
    """Sectoriality diagnostics of a matrix.

    Attributes
    ----------
    omega_est : float
        Largest argument ``arg(u + iv)`` over the spectral spheres.
    C_phi : dict[float, float]
        For each sampled angle ``phi``, the largest value of ``|s|
        max(|S_L^-1(s, T)|, |S_R^-1(s, T)|)`` seen outside the sector of
        angle ``phi`` (``inf`` where the rays meet the spectrum).
    injective : bool
    invertible : bool
    """
    omega_est: float
    C_phi: dict
    injective: bool
    invertible: bool

    @property
    def sectorial(self):
        return self.omega_est < np.pi - SECTOR_MARGIN


def spectral_angle(spheres):
    """``max arg(u + iv)`` over the spheres, ``0`` for a sphere at ``0``.
    """
    return max((float(np.arctan2(s.v, s.u)) if (s.u, s.v) != (0.0, 0.0)
                else 0.0 for s in spheres), default=0.0)


def _is_invertible(T):
    chi = T.complex_adjoint
    sv = np.linalg.svd(chi, compute_uv=False)
    return bool(sv.min() > 1e-10 * max(1.0, sv.max()))


def sectorial_report(T, angles=None, n_radii=41, n_rays=4):
    """Estimate the spectral angle and sample the resolvent bound constants
    of ``T`` on rays outside sectors of the given ``angles``.

    The moduli ``|s|`` are log-spaced on ``[1e-3 rho, 1e3 rho]`` with
    ``rho`` the spectral radius (``1`` if the spectrum is ``{0}``), and the
    rays are taken in the three coordinate slices.
    """
    T = as_operator(T)
    spectrum = s_spectrum(T)
    omega = spectral_angle(spectrum)
    rho = max(np.hypot(s.u, s.v) for s in spectrum)
    if rho == 0.0:
        rho = 1.0
    if angles is None:
        angles = [np.pi / 8, np.pi / 4, np.pi / 2, 3 * np.pi / 4,
                  7 * np.pi / 8]

    radii = np.geomspace(1e-3 * rho, 1e3 * rho, n_radii)
    C_phi = {}
    for phi in angles:
        phi = float(phi)
        thetas = np.linspace(phi, np.pi, n_rays + 1)[1:]
        if phi <= omega:
            C_phi[phi] = np.inf
            continue
        pts = []
        for k in (1, 2, 3):
            for th in thetas:
                q = np.zeros((n_radii, 4))
                q[:, 0] = radii * np.cos(th)
                q[:, k] = radii * np.sin(th)
                pts.append(q)
        s = np.concatenate(pts)
        with np.errstate(all='ignore'):
            try:
                nl = np.linalg.norm(s_resolvents_batch(T, s, 'left'), 2,
                                    axis=(1, 2))
                nr = np.linalg.norm(s_resolvents_batch(T, s, 'right'), 2,
                                    axis=(1, 2))
            except np.linalg.LinAlgError:
                C_phi[phi] = np.inf
                continue
        vals = np.linalg.norm(s, axis=1) * np.maximum(nl, nr)
        C_phi[phi] = float(np.max(vals)) if np.all(np.isfinite(vals)) \
            else np.inf

    invertible = _is_invertible(T)
    # for matrices injectivity and invertibility coincide
    return SectorialReport(omega, C_phi, invertible, invertible)


# ------------------------------- helpers ----------------------------------- #

def _integer_power(T, alpha):
    if alpha == int(alpha):
        return T**int(alpha)
    return None


def _sector_bounds(T, alpha):
    """Check the spectrum of ``T`` stays off ``(-inf, 0]`` and return the
    smallest and largest spectral moduli.
    """
    spectrum = s_spectrum(T)
    omega = spectral_angle(spectrum)
    mods = [np.hypot(s.u, s.v) for s in spectrum]
    scale = max(1.0, max(mods))
    if min(mods) <= 1e-12 * scale:
        raise SectorError(f"0 lies in the S-spectrum, T^{alpha} is only "
                          "defined here for integer powers.")
    if omega > np.pi - SECTOR_MARGIN:
        raise SectorError(
            f"The S-spectrum meets (-inf, 0] (spectral angle {omega:.9g}).")
    return min(mods), max(mods)


def _record(info, **kwargs):
    if info is not None:
        info.update(kwargs)


def _chunk_moments(entries, t, W, kind, m=1):
    """``sum_k W[j, k] K(t_k)`` for each row ``j`` of ``W``, in the
    embedding, with ``K(t) = (t + T)^-1`` (``'resolvent'``), ``(I +
    tT)^-1`` (``'pencil'``) or ``[T (t + T)^-1]^m`` (``'kernel'``).
    """
    T = QMatrixOperator(entries)
    chi = T.complex_adjoint
    eye = np.eye(chi.shape[0])
    if kind == 'pencil':
        A = eye[None] + t[:, None, None] * chi[None]
    else:
        A = chi[None] + t[:, None, None] * eye[None]
    K = np.linalg.solve(A, np.broadcast_to(eye, A.shape))
    if kind == 'kernel':
        K = np.linalg.matrix_power(chi[None] @ K, m)
    return oe.contract('jk,kab->jab', W, K)


def _moments(T, t, W, kind, m=1, parallel=False):
    W = np.atleast_2d(W)
    chunks = [(T.entries, t[list(ix)], W[:, list(ix)], kind, m)
              for ix in partition_all(_CHUNK_NODES, range(len(t)))]
    total = 0.0
    for p in map_chunks(_chunk_moments, chunks, parallel=parallel):
        total = total + p
    return total


def _embedded(T):
    chi = T.complex_adjoint
    return chi, np.eye(chi.shape[0])


def _embedded_inverse(T):
    try:
        return T.inverse().complex_adjoint
    except SingularError:
        raise SingularError("T is not invertible.")


def _norm(M):
    return float(np.linalg.norm(M, 2))


# -------------------------------- routes ----------------------------------- #

def frac_power_spectral(T, alpha, **kwargs):
    """``T^alpha`` as the S-functional calculus of ``s^alpha``.

    ``alpha`` may be any real number; integer powers are computed as
    matrix powers, which also allows ``0`` in the spectrum.

    Examples
    --------

        >>> T = QMatrixOperator.diag([4.0])
        >>> frac_power_spectral(T, 0.5).allclose(QMatrixOperator.diag([2.0]))
        True

    """
    T = as_operator(T)
    alpha = float(alpha)
    exact = _integer_power(T, alpha)
    if exact is not None:
        return exact
    _sector_bounds(T, alpha)
    return s_funcalc_left(power(alpha), T, **kwargs).operator


def frac_power_balakrishnan(T, alpha, quad=DEFAULT_QUAD, parallel=False,
                            info=None):
    """``T^alpha`` for ``0 < alpha < 1`` from the Balakrishnan integral::

        T^alpha = sin(alpha pi) / pi int_0^inf t^(alpha-1) (t+T)^-1 T dt
    """
    T = as_operator(T)
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"The Balakrishnan route needs 0 < alpha < 1, got "
                         f"{alpha}, use frac_power_balakrishnan_m.")
    lam_min, lam_max = _sector_bounds(T, alpha)
    chi, eye = _embedded(T)
    Tinv = _embedded_inverse(T)
    t, w, lo, hi = half_line_rule(quad, lam_min, lam_max)

    A = _moments(T, t, w * t**(alpha - 1), 'resolvent', parallel=parallel)[0]
    small = mi(alpha - 1, 0.0, lo) * eye - mi(alpha, 0.0, lo) * Tinv
    large = mi(alpha - 2, hi) * chi - mi(alpha - 3, hi) * (chi @ chi)
    c = np.sin(alpha * np.pi) / np.pi
    tail = c * (mi(alpha, 0.0, lo) * _norm(Tinv) +
                abs(mi(alpha - 3, hi)) * _norm(chi)**2)
    check_tail(tail, quad, 'Balakrishnan integral')
    _record(info, tail_estimate=tail, nodes=len(t), lo=lo, hi=hi)
    return QMatrixOperator.from_complex_adjoint(c * (A @ chi + small + large))


def frac_power_balakrishnan_m(T, alpha, m=None, quad=DEFAULT_QUAD,
                              parallel=False, info=None):
    """``T^alpha`` for ``0 < alpha < m`` from the higher order kernel::

        T^alpha = G(m) / (G(alpha) G(m - alpha))
                  int_0^inf t^(alpha-1) [T (t+T)^-1]^m dt

    ``m`` defaults to ``floor(alpha) + 1``.
    """
    T = as_operator(T)
    alpha = float(alpha)
    if m is None:
        m = int(np.floor(alpha)) + 1
    m = int(m)
    if m < 1 or not (0.0 < alpha < m):
        raise ValueError(f"Need 0 < alpha < m with m >= 1, got alpha={alpha}, "
                         f"m={m}.")
    lam_min, lam_max = _sector_bounds(T, alpha)
    chi, eye = _embedded(T)
    Tinv = _embedded_inverse(T)
    t, w, lo, hi = half_line_rule(quad, lam_min, lam_max)

    A = _moments(T, t, w * t**(alpha - 1), 'kernel', m=m,
                 parallel=parallel)[0]
    Tm = np.linalg.matrix_power(chi, m)
    small = mi(alpha - 1, 0.0, lo) * eye - m * mi(alpha, 0.0, lo) * Tinv
    large = (mi(alpha - 1 - m, hi) * Tm -
             m * mi(alpha - 2 - m, hi) * (Tm @ chi))
    c = gamma(m) / (gamma(alpha) * gamma(m - alpha))
    tail = abs(c) * (m * mi(alpha, 0.0, lo) * _norm(Tinv) +
                     m * abs(mi(alpha - 2 - m, hi)) * _norm(chi)**(m + 1))
    check_tail(tail, quad, f'order {m} Balakrishnan integral')
    _record(info, tail_estimate=tail, nodes=len(t), m=m, lo=lo, hi=hi)
    return QMatrixOperator.from_complex_adjoint(c * (A + small + large))


def frac_power_negative(T, alpha, quad=DEFAULT_QUAD, parallel=False,
                        info=None):
    """``T^-alpha`` for ``0 < alpha < 1``::

        T^-alpha = sin(alpha pi) / pi int_0^inf t^-alpha (t+T)^-1 dt

    which is ``-sin(alpha pi)/pi int t^-alpha S_R^-1(-t, T) dt``.
    """
    T = as_operator(T)
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"The negative power route needs 0 < alpha < 1, got "
                         f"{alpha}.")
    lam_min, lam_max = _sector_bounds(T, -alpha)
    chi, eye = _embedded(T)
    Tinv = _embedded_inverse(T)
    t, w, lo, hi = half_line_rule(quad, lam_min, lam_max)

    A = _moments(T, t, w * t**(-alpha), 'resolvent', parallel=parallel)[0]
    small = mi(-alpha, 0.0, lo) * Tinv - mi(1 - alpha, 0.0, lo) * (Tinv @ Tinv)
    large = mi(-alpha - 1, hi) * eye - mi(-alpha - 2, hi) * chi
    c = np.sin(alpha * np.pi) / np.pi
    tail = c * (mi(1 - alpha, 0.0, lo) * _norm(Tinv)**2 +
                abs(mi(-alpha - 2, hi)) * _norm(chi))
    check_tail(tail, quad, 'negative power integral')
    _record(info, tail_estimate=tail, nodes=len(t), lo=lo, hi=hi)
    return QMatrixOperator.from_complex_adjoint(c * (A + small + large))


def _split_points(quad, lam_min, lam_max):
    lo = min(quad.eps * lam_min, 0.5)
    hi = max(quad.Lam * lam_max, 2.0)
    return lo, hi


def _check_komatsu_alpha(alpha):
    if not (-1.0 < alpha < 1.0) or alpha == 0.0:
        raise ValueError(f"The Komatsu forms need alpha in (-1, 1) without "
                         f"0, got {alpha}.")


def frac_power_komatsu(T, alpha, quad=DEFAULT_QUAD, parallel=False,
                       info=None):
    """``T^alpha`` for ``alpha`` in ``(-1, 1)``, ``alpha != 0``, from::

        sin(alpha pi) / pi [ I / alpha - T^-1 / (1 + alpha)
                             + int_0^1 t^(alpha+1) (t+T)^-1 T^-1 dt
                             + int_1^inf t^(alpha-1) (t+T)^-1 T dt ]
    """
    T = as_operator(T)
    alpha = float(alpha)
    _check_komatsu_alpha(alpha)
    lam_min, lam_max = _sector_bounds(T, alpha)
    chi, eye = _embedded(T)
    Tinv = _embedded_inverse(T)
    lo, hi = _split_points(quad, lam_min, lam_max)
    half = max(1, quad.panels // 2)
    t1, w1 = log_rule(lo, 1.0, half, quad.order)
    t2, w2 = log_rule(1.0, hi, half, quad.order)

    A = _moments(T, t1, w1 * t1**(alpha + 1), 'resolvent',
                 parallel=parallel)[0]
    B = _moments(T, t2, w2 * t2**(alpha - 1), 'resolvent',
                 parallel=parallel)[0]
    A = A + mi(alpha + 1, 0.0, lo) * Tinv - mi(alpha + 2, 0.0, lo) * (
        Tinv @ Tinv)
    B = B + mi(alpha - 2, hi) * eye - mi(alpha - 3, hi) * chi
    c = np.sin(alpha * np.pi) / np.pi
    out = c * (eye / alpha - Tinv / (1 + alpha) + A @ Tinv + B @ chi)
    tail = abs(c) * (mi(alpha + 2, 0.0, lo) * _norm(Tinv)**3 +
                     abs(mi(alpha - 3, hi)) * _norm(chi)**2)
    check_tail(tail, quad, 'Komatsu integrals')
    _record(info, tail_estimate=tail, nodes=len(t1) + len(t2), lo=lo, hi=hi)
    return QMatrixOperator.from_complex_adjoint(out)


def frac_power_komatsu2(T, alpha, quad=DEFAULT_QUAD, parallel=False,
                        info=None):
    """The second Komatsu form::

        sin(alpha pi) / pi [ I / alpha + int_0^1 t^-alpha (I + tT)^-1 T dt
                             - int_0^1 t^alpha (I + tT^-1)^-1 T^-1 dt ]

    using ``(I + tT^-1)^-1 T^-1 = (t + T)^-1``.
    """
    T = as_operator(T)
    alpha = float(alpha)
    _check_komatsu_alpha(alpha)
    lam_min, lam_max = _sector_bounds(T, alpha)
    chi, eye = _embedded(T)
    Tinv = _embedded_inverse(T)
    lo, _ = _split_points(quad, lam_min, lam_max)
    t, w = log_rule(lo, 1.0, quad.panels, quad.order)

    C = _moments(T, t, w * t**(-alpha), 'pencil', parallel=parallel)[0]
    D = _moments(T, t, w * t**alpha, 'resolvent', parallel=parallel)[0]
    C = C + mi(-alpha, 0.0, lo) * eye - mi(1 - alpha, 0.0, lo) * chi
    D = D + mi(alpha, 0.0, lo) * Tinv - mi(alpha + 1, 0.0, lo) * (Tinv @ Tinv)
    c = np.sin(alpha * np.pi) / np.pi
    out = c * (eye / alpha + C @ chi - D)
    tail = abs(c) * (mi(1 - alpha, 0.0, lo) * _norm(chi)**2 +
                     mi(alpha + 1, 0.0, lo) * _norm(Tinv)**2)
    check_tail(tail, quad, 'Komatsu integrals')
    _record(info, tail_estimate=tail, nodes=2 * len(t), lo=lo)
    return QMatrixOperator.from_complex_adjoint(out)


# ------------------------------- analyticity ------------------------------- #

def frac_power_log_derivative(T, alpha, method='spectral', quad=DEFAULT_QUAD,
                              **kwargs):
    """``d/dalpha T^alpha = (s^alpha log s)(T)``.

    With ``method='balakrishnan'`` (``0 < alpha < 1``) the Balakrishnan
    integral is differentiated under the integral sign instead, which
    brings a ``log t`` into the kernel.
    """
    T = as_operator(T)
    alpha = float(alpha)
    if method == 'spectral':
        _sector_bounds(T, alpha)
        f = IntrinsicSliceFunction(lambda z: np.power(z, alpha) * np.log(z),
                                   domain=SLIT_PLANE, name=f"s^{alpha}log(s)")
        return s_funcalc_left(f, T, **kwargs).operator

    if method != 'balakrishnan':
        raise ValueError(f"Unknown method {method!r}, choose 'spectral' or "
                         "'balakrishnan'.")
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"Need 0 < alpha < 1, got {alpha}.")
    lam_min, lam_max = _sector_bounds(T, alpha)
    chi, eye = _embedded(T)
    Tinv = _embedded_inverse(T)
    t, w, lo, hi = half_line_rule(quad, lam_min, lam_max)
    A, L = _moments(T, t, [w * t**(alpha - 1),
                           w * t**(alpha - 1) * np.log(t)], 'resolvent',
                    parallel=kwargs.get('parallel', False))
    chi2 = chi @ chi
    A = A @ chi + mi(alpha - 1, 0.0, lo) * eye - mi(alpha, 0.0, lo) * Tinv \
        + mi(alpha - 2, hi) * chi - mi(alpha - 3, hi) * chi2
    L = L @ chi + mli(alpha - 1, 0.0, lo) * eye - mli(alpha, 0.0, lo) * Tinv \
        + mli(alpha - 2, hi) * chi - mli(alpha - 3, hi) * chi2
    out = np.cos(alpha * np.pi) * A + np.sin(alpha * np.pi) / np.pi * L
    return QMatrixOperator.from_complex_adjoint(out)


# -------------------------------- registry --------------------------------- #

_FRAC_POWER_METHODS = {}


def register_frac_power_method(name, fn):
    """Register ``fn(T, alpha, quad=..., parallel=..., info=...)`` as a
    fractional power route callable through :func:`frac_power`.
    """
    _FRAC_POWER_METHODS[name] = fn


def list_frac_power_methods():
    """Return a list of the registered fractional power routes.
    """
    return sorted(_FRAC_POWER_METHODS)


def _spectral_method(T, alpha, quad=DEFAULT_QUAD, parallel=False, info=None):
    exact = _integer_power(T, alpha)
    if exact is not None:
        _record(info, exact=True)
        return exact
    _sector_bounds(T, alpha)
    res = s_funcalc_left(power(alpha), T, parallel=parallel)
    _record(info, est_quadrature_error=res.est_quadrature_error,
            nodes=res.n_nodes)
    return res.operator


def _balakrishnan_method(T, alpha, quad=DEFAULT_QUAD, parallel=False,
                         info=None):
    if 0.0 < alpha < 1.0:
        return frac_power_balakrishnan(T, alpha, quad, parallel, info)
    if alpha > 1.0:
        return frac_power_balakrishnan_m(T, alpha, None, quad, parallel, info)
    if -1.0 < alpha < 0.0:
        return frac_power_negative(T, -alpha, quad, parallel, info)
    # alpha <= -1: apply the positive routes to the inverse
    Tinv = as_operator(T).inverse()
    return _balakrishnan_method(Tinv, -alpha, quad, parallel, info)


def _negative_method(T, alpha, quad=DEFAULT_QUAD, parallel=False, info=None):
    if not (-1.0 < alpha < 0.0):
        raise ValueError(f"The 'negative' route computes T^alpha for alpha in "
                         f"(-1, 0), got {alpha}.")
    return frac_power_negative(T, -alpha, quad, parallel, info)


register_frac_power_method('spectral', _spectral_method)
register_frac_power_method('balakrishnan', _balakrishnan_method)
register_frac_power_method('balakrishnan_m', frac_power_balakrishnan_m)
register_frac_power_method('negative', _negative_method)
register_frac_power_method('komatsu', frac_power_komatsu)
register_frac_power_method('komatsu2', frac_power_komatsu2)


class FracPowerResult(NamedTuple):
    operator: QMatrixOperator
    method: str
    alpha: float
    diagnostics: dict


def frac_power(T, alpha, method='spectral', quad=DEFAULT_QUAD, parallel=False):
    """Compute ``T^alpha`` with a registered route.

    Parameters
    ----------
    T : QMatrixOperator or array_like
    alpha : float
    method : str, optional
        One of :func:`list_frac_power_methods`.
    quad : QuadSpec, optional
        Half-line quadrature parameters of the integral routes.
    parallel : bool, int or pool, optional

    Returns
    -------
    FracPowerResult

    Raises
    ------
    SectorError
        If the S-spectrum touches ``(-inf, 0]`` (for non-integer powers).
    """
    T = as_operator(T)
    alpha = float(alpha)
    try:
        fn = _FRAC_POWER_METHODS[method]
    except KeyError:
        raise ValueError(f"Unknown method {method!r}, choose from "
                         f"{list_frac_power_methods()}.")
    info = {}
    exact = _integer_power(T, alpha)
    if exact is not None:
        info['exact'] = True
        op = exact
    else:
        op = fn(T, alpha, quad=quad, parallel=parallel, info=info)
    return FracPowerResult(op, method, alpha, info)


class CrossCheck(NamedTuple):
    results: dict
    deltas: dict

    @property
    def max_delta(self):
        return max(self.deltas.values(), default=0.0)


def _applicable(method, alpha):
    if method in ('spectral', 'balakrishnan'):
        return True
    if method == 'balakrishnan_m':
        return alpha > 0.0
    if method == 'negative':
        return -1.0 < alpha < 0.0
    if method in ('komatsu', 'komatsu2'):
        return -1.0 < alpha < 1.0 and alpha != 0.0
    return True


def cross_check(T, alpha, methods=None, quad=DEFAULT_QUAD, parallel=False):
    """Compute ``T^alpha`` with every applicable route and report the
    max-norm distance of each to the spectral reference.
    """
    T = as_operator(T)
    alpha = float(alpha)
    if methods is None:
        methods = list_frac_power_methods()
    results = {m: frac_power(T, alpha, m, quad, parallel)
               for m in methods if _applicable(m, alpha)}
    ref = results.get('spectral') or frac_power(T, alpha, 'spectral')
    deltas = {m: ref.operator.distance(r.operator)
              for m, r in results.items() if m != 'spectral'}
    return CrossCheck(results, deltas)
