"""Composite Gauss-Legendre rules, on finite intervals and on the half line
through the substitution ``t = exp(u)``.
"""
import functools
import warnings

import numpy as np

from .errors import QuadratureWarning


@functools.lru_cache(None)
def gauss_legendre(order):
    """Nodes and weights of the ``order``-point Gauss-Legendre rule on
    ``[-1, 1]`` (cached, read-only).
    """
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_rule(a, b, panels, order):
    """Nodes and weights of the composite rule with ``panels`` equal panels
    of ``order`` points each on ``[a, b]``.

    Examples
    --------

        >>> x, w = composite_rule(0.0, 1.0, 4, 8)
        >>> round(float(np.sum(w * x**3)), 12)
        0.25

    """
    xg, wg = gauss_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    return x, w


def monomial_integral(p, a=0.0, b=np.inf):
    """``int_a^b t^p dt`` for the two improper cases the tails need: ``a =
    0`` with ``p > -1`` or ``b = inf`` with ``p < -1``.
    """
    if a == 0.0:
        if p <= -1:
            raise ValueError(f"t^{p} is not integrable at 0.")
        lo = 0.0
    else:
        lo = a**(p + 1)
    if b == np.inf:
        if p >= -1:
            raise ValueError(f"t^{p} is not integrable at infinity.")
        hi = 0.0
    else:
        hi = b**(p + 1)
    return (hi - lo) / (p + 1)


class QuadSpec:
    """Parameters of the half-line quadrature used by the fractional power
    routes.

    Parameters
    ----------
    panels : int, optional
        Number of panels on the ``u = log t`` line.
    order : int, optional
        Gauss-Legendre points per panel.
    eps : float, optional
        Lower truncation ``t >= eps * lam_min``.
    Lam : float, optional
        Upper truncation ``t <= Lam * lam_max``.
    tol : float, optional
        Tail estimates above this raise a :class:`QuadratureWarning`.
    """

    __slots__ = ('panels', 'order', 'eps', 'Lam', 'tol')

    def __init__(self, panels=64, order=16, eps=1e-8, Lam=1e8, tol=1e-8):
        if int(panels) < 1 or int(order) < 1:
            raise ValueError(f"Need at least one panel and one node, got "
                             f"panels={panels}, order={order}.")
        if not (0.0 < eps < 1.0 < Lam):
            raise ValueError(f"Need 0 < eps < 1 < Lam, got eps={eps}, "
                             f"Lam={Lam}.")
        if tol <= 0.0:
            raise ValueError(f"tol must be positive, got {tol}.")
        self.panels = int(panels)
        self.order = int(order)
        self.eps = float(eps)
        self.Lam = float(Lam)
        self.tol = float(tol)

    def refined(self, factor=2):
        return QuadSpec(self.panels * factor, self.order, self.eps, self.Lam,
                        self.tol)

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__slots__}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.as_dict().items())
        return f"QuadSpec({args})"


DEFAULT_QUAD = QuadSpec()


def log_rule(lo, hi, panels, order):
    """Nodes ``t`` and weights for ``int_lo^hi g(t) dt`` integrated as
    ``int g(e^u) e^u du`` over ``[log lo, log hi]``.
    """
    if not (0.0 < lo < hi):
        raise ValueError(f"Need 0 < lo < hi, got lo={lo}, hi={hi}.")
    u, w = composite_rule(np.log(lo), np.log(hi), panels, order)
    t = np.exp(u)
    return t, w * t


def half_line_rule(spec, lam_min, lam_max):
    """Truncated half-line rule for integrands whose behaviour changes near
    the spectral scales ``lam_min`` and ``lam_max``. Returns ``(t, w, lo,
    hi)`` with the truncation points so callers can add tail corrections.
    """
    lo = spec.eps * lam_min
    hi = spec.Lam * lam_max
    t, w = log_rule(lo, hi, spec.panels, spec.order)
    return t, w, lo, hi


def check_tail(estimate, spec, what='integral'):
    """Warn if the tail ``estimate`` of a truncated ``what`` exceeds the
    tolerance of ``spec``.
    """
    if estimate > spec.tol:
        warnings.warn(
            f"Truncation tail of the {what} estimated at {estimate:.3e}, "
            f"above tol={spec.tol:.1e}; widen eps/Lam.", QuadratureWarning,
            stacklevel=3)


def monomial_log_integral(p, a=0.0, b=np.inf):
    """``int_a^b t^p log(t) dt`` for the same two improper cases as
    :func:`monomial_integral`.
    """
    def antiderivative(t):
        return t**(p + 1) / (p + 1) * (np.log(t) - 1.0 / (p + 1))

    if a == 0.0:
        if p <= -1:
            raise ValueError(f"t^{p} log t is not integrable at 0.")
        lo = 0.0
    else:
        lo = antiderivative(a)
    if b == np.inf:
        if p >= -1:
            raise ValueError(f"t^{p} log t is not integrable at infinity.")
        hi = 0.0
    else:
        hi = antiderivative(b)
    return hi - lo
