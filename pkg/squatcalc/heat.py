"""Time stepping for the fractional heat equation on periodic grids, in the
direct form ``du/dt + (-Delta)^alpha u = 0`` and in the divergence form::

    du/dt - 2 div(Vec f_beta(nabla) u) = 0,    beta = 2 alpha - 1

plus the variable coefficient operator ``T = sum_l xi_l d/dxi_l e_l`` on the
positive octant, conjugate to nabla by the logarithmic change of variables.
"""
import functools
import math
import os
import re
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .errors import DomainError, ExpressionError, StabilityError
from .field import SpectralField, _fftn, wavevectors
from .nabla import (div_vec, frac_laplacian, frac_nabla_closed,
                    frac_nabla_quadrature, nabla_apply)
from .quadrature import DEFAULT_QUAD
from .quaternion import E1, E2, E3, as_qarray, qmul_array
from .utils import progbar as _progbar


SCHEMES = ('exact', 'euler')
FORMS = ('direct', 'divergence', 'both')

# points per finite difference stencil on the xi axes
XI_STENCIL = 9


class EvolutionConfig:
    """Parameters of a heat run.

    Parameters
    ----------
    alpha : float
        Diffusion exponent, in ``(0, 1]`` for the direct form and in ``(1/2,
        1)`` whenever the divergence form is involved.
    dt : float
        Time step.
    steps : int
        Number of steps.
    scheme : {'exact', 'euler'}, optional
        Exact propagator or explicit Euler.
    form : {'direct', 'divergence', 'both'}, optional
        Which form to step; ``'both'`` steps the two side by side and
        reports their difference.
    """

    __slots__ = ('alpha', 'dt', 'steps', 'scheme', 'form')

    def __init__(self, alpha, dt, steps, scheme='exact', form='direct'):
        alpha = float(alpha)
        if scheme not in SCHEMES:
            raise ValueError(f"Unknown scheme {scheme!r}, choose from "
                             f"{SCHEMES}.")
        if form not in FORMS:
            raise ValueError(f"Unknown form {form!r}, choose from {FORMS}.")
        if form == 'direct':
            if not 0.0 < alpha <= 1.0:
                raise DomainError(f"alpha must lie in (0, 1], got {alpha}.")
        elif not 0.5 < alpha < 1.0:
            raise DomainError(f"The divergence form needs alpha in (1/2, 1),"
                              f" got {alpha}.")
        if not dt > 0.0:
            raise ValueError(f"dt must be positive, got {dt}.")
        if int(steps) < 0:
            raise ValueError(f"steps must be nonnegative, got {steps}.")
        self.alpha = alpha
        self.dt = float(dt)
        self.steps = int(steps)
        self.scheme = scheme
        self.form = form

    @property
    def beta(self):
        return 2 * self.alpha - 1

    def replace(self, **kwargs):
        d = {k: getattr(self, k) for k in self.__slots__}
        d.update(kwargs)
        return EvolutionConfig(**d)

    def __repr__(self):
        args = ", ".join(f"{k}={getattr(self, k)!r}" for k in self.__slots__)
        return f"EvolutionConfig({args})"


def _require_real(u):
    if not u.is_real():
        raise DomainError("Heat evolution acts on real (scalar) fields, got "
                          "a field with a vector part.")


def _step_with(u, m):
    """Multiply the transform of the scalar part of ``u`` by ``m``.
    """
    uh = _fftn(u.scalar) * m
    return SpectralField.from_hat(
        np.concatenate([uh[..., None], np.zeros(uh.shape + (3,))], axis=-1),
        u.box)


# ------------------------------ direct form -------------------------------- #

def direct_symbol(dims, box, alpha):
    """``-|xi|^(2 alpha)``, the symbol of ``-(-Delta)^alpha``.
    """
    _, nu = wavevectors(tuple(dims), tuple(box))
    return -nu**(2 * alpha)


def euler_bound(symbol):
    """Largest stable explicit Euler step for the real, nonpositive
    ``symbol``.
    """
    top = float(np.max(np.abs(symbol)))
    return np.inf if top == 0.0 else 2.0 / top


def _propagator(symbol, cfg):
    if cfg.scheme == 'exact':
        return np.exp(cfg.dt * symbol)
    bound = euler_bound(symbol)
    if cfg.dt > bound:
        raise StabilityError(f"Explicit Euler needs dt <= {bound:.6g} on "
                             f"this grid, got dt={cfg.dt:.6g}.")
    return 1.0 + cfg.dt * symbol


def heat_step_direct(u, cfg):
    """One step of ``du/dt = -(-Delta)^alpha u``: every mode is multiplied
    by ``exp(-|xi|^(2 alpha) dt)`` (exact) or ``1 - dt |xi|^(2 alpha)``
    (Euler).

    Raises
    ------
    StabilityError
        Euler with ``dt > 2 / max |xi|^(2 alpha)``.
    """
    _require_real(u)
    return _step_with(u, _propagator(direct_symbol(u.dims, u.box,
                                                   cfg.alpha), cfg))


# ---------------------------- divergence form ------------------------------ #

def divergence_rhs(u, beta):
    """``2 div(Vec f_beta(nabla) u)`` as a real field.
    """
    return SpectralField(2.0 * div_vec(u, beta), u.box)


@functools.lru_cache(16)
def divergence_symbol(dims, box, beta):
    """Symbol of ``u -> 2 div(Vec f_beta(nabla) u)``, read off as the
    transform of its response to a unit impulse at the origin.
    """
    delta = np.zeros(dims)
    delta[0, 0, 0] = 1.0
    m = _fftn(divergence_rhs(SpectralField(delta, box), beta).scalar)
    m = m.real
    m.setflags(write=False)
    return m


def heat_step_divergence(u, cfg):
    """One step of ``du/dt = 2 div(Vec f_beta(nabla) u)`` with ``beta = 2
    alpha - 1``. Euler applies the operator to ``u`` itself, the exact
    propagator exponentiates its symbol.
    """
    _require_real(u)
    m = divergence_symbol(u.dims, u.box, cfg.beta)
    if cfg.scheme == 'exact':
        return _step_with(u, np.exp(cfg.dt * m))
    _propagator(m, cfg)
    return u + cfg.dt * divergence_rhs(u, cfg.beta)


def form_symbol_residual(dims, box, alpha):
    """``max |2 div Vec f_beta - (-(-Delta)^alpha)|`` over all modes,
    relative to ``max(1, max |xi|^(2 alpha))``.
    """
    dims, box = tuple(map(int, dims)), tuple(map(float, box))
    direct = direct_symbol(dims, box, alpha)
    div = divergence_symbol(dims, box, 2 * alpha - 1)
    return (float(np.max(np.abs(div - direct))) /
            max(1.0, float(np.max(np.abs(direct)))))


_STEPPERS = {
    'direct': heat_step_direct,
    'divergence': heat_step_divergence,
}


def heat_step(u, cfg, form=None):
    return _STEPPERS[form or cfg.form](u, cfg)


# --------------------------- variable coefficients ------------------------- #

def fd_weights(nodes, x0, order=1):
    """Weights ``w`` such that ``sum(w * f(nodes))`` approximates the
    ``order``-th derivative of ``f`` at ``x0``, exact for polynomials of
    degree below ``len(nodes)``.
    """
    nodes = np.asarray(nodes, dtype=float)
    h = float(np.max(np.abs(nodes - x0)))
    t = (nodes - x0) / h
    rhs = np.zeros(len(nodes))
    rhs[order] = math.factorial(order)
    return sla.solve(np.vander(t, increasing=True).T, rhs) / h**order


def xi_derivative_matrix(xi, stencil=XI_STENCIL):
    """``D`` with ``D @ v`` approximating ``dv/dxi`` on the (non-uniform)
    nodes ``xi``. Central stencils of ``stencil`` points inside, one sided
    ones near the ends, since the ``xi`` axis is not periodic.
    """
    xi = np.asarray(xi, dtype=float)
    n = len(xi)
    m = min(int(stencil), n)
    D = np.zeros((n, n))
    if m < 2:
        return D
    for i in range(n):
        lo = min(max(i - m // 2, 0), n - m)
        D[i, lo:lo + m] = fd_weights(xi[lo:lo + m], xi[i])
    return D


class LogGridOperator:
    """The operator ``T = sum_l xi_l d/dxi_l e_l`` on a grid of the positive
    octant that is uniform in ``x = log xi``.

    ``J`` maps a function of ``xi`` to the function ``x -> v(exp(x))``, an
    isometry from ``L2(dxi / (xi1 xi2 xi3))`` onto flat ``L2``, and ``T =
    J^-1 nabla J``. On samples ``J`` only changes the grid the values are
    attached to. The periodic box in ``x`` stands in for the whole octant,
    so fields should decay towards its faces.

    :meth:`apply_T` discretises ``T`` itself, with finite differences on the
    ``xi`` nodes; :meth:`apply_T_conjugated` goes through the spectral
    nabla. Their difference is the discretisation error of the stencils.

    Parameters
    ----------
    dims : tuple of int
        Grid size.
    box : tuple of float, optional
        Periods in ``x``, by default ``2 pi``.
    lower : tuple of float, optional
        Lower corner in ``x``, by default centring the box on ``xi = 1``.
    stencil : int, optional
        Points per finite difference stencil along each ``xi`` axis.
    """

    __slots__ = ('dims', 'box', 'lower', 'stencil')

    def __init__(self, dims, box=None, lower=None, stencil=XI_STENCIL):
        self.dims = tuple(int(n) for n in dims)
        if box is None:
            box = (2 * np.pi,) * 3
        self.box = tuple(float(L) for L in box)
        if lower is None:
            lower = tuple(-0.5 * L for L in self.box)
        self.lower = tuple(float(a) for a in lower)
        if int(stencil) < 2:
            raise ValueError(f"A stencil needs at least 2 points, got "
                             f"{stencil}.")
        self.stencil = int(stencil)

    def x_grid(self):
        x = [a + np.arange(n) * L / n
             for a, n, L in zip(self.lower, self.dims, self.box)]
        return (x[0][:, None, None], x[1][None, :, None],
                x[2][None, None, :])

    def xi_grid(self):
        return tuple(np.exp(x) for x in self.x_grid())

    def sample(self, fn):
        """Values of ``fn(xi1, xi2, xi3)`` on the grid.
        """
        xi = self.xi_grid()
        values = np.asarray(fn(*xi), dtype=float)
        return np.broadcast_to(values, self.dims + values.shape[3:]).copy()

    def J(self, values):
        return SpectralField(values, self.box)

    def J_inverse(self, field):
        return np.array(field.values)

    def apply_T(self, values):
        """``sum_l e_l xi_l d/dxi_l v`` with each ``d/dxi_l`` taken by
        finite differences along the ``xi_l`` nodes.
        """
        v = self.J(values).values
        xi = self.xi_grid()
        out = np.zeros_like(v)
        for l, e in enumerate((E1, E2, E3)):
            D = xi_derivative_matrix(xi[l].ravel(), self.stencil)
            dv = np.moveaxis(np.tensordot(D, np.moveaxis(v, l, 0), axes=1),
                             0, l)
            out += qmul_array(as_qarray(e), xi[l][..., None] * dv)
        return out

    def apply_T_conjugated(self, values):
        """``J^-1 nabla J v``.
        """
        return self.J_inverse(nabla_apply(self.J(values)))

    def conjugation_residual(self, values):
        """``max |T v - J^-1 nabla J v|``, which falls like ``h^(stencil -
        1)`` in the ``x`` spacing ``h`` for fields decaying inside the box.
        """
        return float(np.max(np.abs(self.apply_T(values) -
                                   self.apply_T_conjugated(values))))


class VarCoefResult(NamedTuple):
    vec: np.ndarray
    vec_check: np.ndarray
    delta: float


def varcoef_vec_fracpower(op, values, alpha, quad=DEFAULT_QUAD):
    """``Vec f_alpha(T) v`` for a real ``v`` sampled on the grid of the
    :class:`LogGridOperator` ``op``, computed as::

        1/2 J^-1 (-Delta)^((alpha - 1)/2) J T v

    and checked against ``Vec J^-1 f_alpha(nabla) J v`` with ``f_alpha``
    from the S-resolvent quadrature (the closed form at ``alpha = 1``).
    """
    values = np.asarray(values, dtype=float)
    if values.ndim == 4:
        if np.any(values[..., 1:] != 0.0):
            raise DomainError("Vec f_alpha(T) v is only given for real v.")
        values = values[..., 0]
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}.")
    Tv = op.J(op.apply_T_conjugated(values))
    vec = 0.5 * op.J_inverse(frac_laplacian(Tv, 0.5 * (alpha - 1)))[..., 1:]

    Jv = op.J(values)
    if alpha < 1.0:
        f = frac_nabla_quadrature(Jv, alpha, quad)
    else:
        f = frac_nabla_closed(Jv, alpha)
    vec_check = op.J_inverse(f)[..., 1:]
    return VarCoefResult(vec, vec_check,
                         float(np.max(np.abs(vec - vec_check))))


# --------------------------- initial conditions ---------------------------- #

_MODE = re.compile(r'^\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*'
                   r'(?:,\s*([-+0-9.eE]+)\s*)?$')


def parse_modes(text):
    """Parse ``'k1,k2,k3,amp;k1,k2,k3,amp;...'`` (``amp`` defaults to 1).

    Examples
    --------

        >>> parse_modes('1,0,0,0.5; 0,2,0')
        [((1, 0, 0), 0.5), ((0, 2, 0), 1.0)]

    """
    modes = []
    for part in filter(None, (p.strip() for p in text.split(';'))):
        m = _MODE.match(part)
        if m is None:
            raise ExpressionError(f"Can't parse mode {part!r}, expected "
                                  "'k1,k2,k3[,amp]'.")
        k = tuple(int(m.group(i)) for i in (1, 2, 3))
        try:
            amp = 1.0 if m.group(4) is None else float(m.group(4))
        except ValueError:
            raise ExpressionError(f"Bad amplitude in mode {part!r}.")
        modes.append((k, amp))
    if not modes:
        raise ExpressionError(f"No modes given in {text!r}.")
    return modes


def initial_condition(source, dims, box=None):
    """A real initial field from ``'gauss'``, ``'modes:<spec>'`` (see
    :func:`parse_modes`) or ``'file:<path>'`` (an SQF1 field).
    """
    if isinstance(source, SpectralField):
        u = source
    elif source == 'gauss':
        u = SpectralField.gaussian(dims, box)
    elif source.startswith('modes:'):
        u = SpectralField.zeros(dims, box)
        for k, amp in parse_modes(source[len('modes:'):]):
            u = u + SpectralField.single_mode(k, dims, box, amplitude=amp)
    elif source.startswith('file:'):
        from .io import read_field
        u = read_field(source[len('file:'):])
    else:
        raise ExpressionError(f"Unknown initial condition {source!r}, use "
                              "'gauss', 'modes:<spec>' or 'file:<path>'.")
    _require_real(u)
    return u


# -------------------------------- driver ----------------------------------- #

NORMS_HEADER = ('step', 't', 'l2', 'min', 'max', 'form_delta')


class NormRow(NamedTuple):
    step: int
    t: float
    l2: float
    min: float
    max: float
    form_delta: float


class SimulationResult(NamedTuple):
    rows: list
    final: SpectralField
    snapshots: list

    @property
    def max_form_delta(self):
        deltas = [r.form_delta for r in self.rows
                  if not math.isnan(r.form_delta)]
        return max(deltas, default=math.nan)


def _row(step, t, u, delta=math.nan):
    lo, hi = u.minmax()
    return NormRow(step, t, u.l2_norm(), lo, hi, delta)


def run_simulation(initial, cfg, out_dir=None, snap_every=0, progbar=False):
    """Step ``cfg.steps`` times from ``initial`` and record the L2 norm,
    minimum and maximum after every step.

    Parameters
    ----------
    initial : SpectralField
        Real initial field.
    cfg : EvolutionConfig
        With ``form='both'`` the direct form is the reported solution and
        the L2 distance to the divergence form solution is written as
        ``form_delta``.
    out_dir : str, optional
        If given, write ``norms.csv`` and every ``snap_every``-th field as
        ``snap_<step>.sqf`` into it.
    snap_every : int, optional
        Snapshot interval, 0 for none.
    progbar : bool, optional
        Show a ``tqdm`` progress bar.
    """
    from .io import write_field, write_norms_csv

    _require_real(initial)
    u = initial
    w = initial if cfg.form == 'both' else None
    primary = 'divergence' if cfg.form == 'divergence' else 'direct'

    snapshots = []

    def snapshot(step, field):
        if out_dir and snap_every and step % snap_every == 0:
            path = os.path.join(out_dir, f"snap_{step:06d}.sqf")
            write_field(path, field)
            snapshots.append(path)

    if out_dir:
        os.makedirs(out_dir, exist_ok=True)

    rows = [_row(0, 0.0, u, 0.0 if w is not None else math.nan)]
    snapshot(0, u)
    its = _progbar(range(1, cfg.steps + 1), progbar=progbar,
                   desc='heat', total=cfg.steps)
    for step in its:
        u = heat_step(u, cfg, primary)
        delta = math.nan
        if w is not None:
            w = heat_step_divergence(w, cfg)
            delta = (u - w).l2_norm()
        rows.append(_row(step, step * cfg.dt, u, delta))
        snapshot(step, u)

    if out_dir:
        write_norms_csv(os.path.join(out_dir, 'norms.csv'), rows)
    return SimulationResult(rows, u, snapshots)
