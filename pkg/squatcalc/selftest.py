"""A registry of end-to-end numerical checks, run by ``squatcalc selftest``.

Every check returns the worst value of the quantity it bounds; it passes if
that value is at most its tolerance. Sizes are reduced so that the whole
suite runs in well under a minute.
"""
import functools
import time
import warnings
from typing import NamedTuple

import numpy as np

from .calculus import poly_of, s_funcalc_left, spectral_mapping_check
from .expression import parse_expression
from .field import SpectralField, rel_l2_error
from .fracpower import cross_check, frac_power, sectorial_report
from .heat import (EvolutionConfig, LogGridOperator, form_symbol_residual,
                   heat_step_direct, run_simulation, varcoef_vec_fracpower)
from .nabla import (div_vec_identity, frac_nabla_closed,
                    frac_nabla_quadrature, symbol_table)
from .qmatrix import (QMatrixOperator, min_singular_value,
                      s_resolvent_equation_residual, s_spectrum)
from .quaternion import from_slice_parts
from .slice import identity, polynomial, quadratic
from .utils import (get_rng, progbar as _progbar, rand_qmatrix,
                    rand_quaternion, rand_sectorial_qmatrix)


class Check(NamedTuple):
    fn: object
    tol: float
    description: str


class CheckResult(NamedTuple):
    name: str
    passed: bool
    value: float
    tol: float
    seconds: float
    detail: str = ''


_CHECKS = {}


def register_check(name, tol, description=''):
    """Decorator adding ``fn(seed) -> float`` to the self test suite.
    """
    def wrapper(fn):
        _CHECKS[name] = Check(fn, tol, description)
        return fn
    return wrapper


def list_checks():
    return list(_CHECKS)


# --------------------------------- checks ---------------------------------- #

def _rel(A, B):
    return A.distance(B) / max(1.0, B.max_norm())


@register_check('cauchy-oracle', 1e-8,
                "contour S-calculus vs direct polynomial evaluation")
def check_cauchy_oracle(seed):
    rng = get_rng(seed)
    worst = 0.0
    for _ in range(5):
        T = QMatrixOperator(rand_qmatrix(4, seed=rng))
        a = rand_quaternion(seed=rng)
        for f, coeffs in [(polynomial([1.0]), [1.0]),
                          (identity(), [0.0, 1.0]),
                          (polynomial([0.0, 0.0, 1.0]), [0.0, 0.0, 1.0]),
                          (quadratic(a), quadratic_coeffs(a))]:
            fT = s_funcalc_left(f, T).operator
            worst = max(worst, _rel(fT, poly_of(coeffs, T)))
    return worst


def quadratic_coeffs(a):
    a = np.asarray(a, dtype=float)
    return [float(np.sum(a * a)), -2.0 * float(a[0]), 1.0]


@register_check('resolvent-equation', 1e-10,
                "S-resolvent equation on random probes")
def check_resolvent_equation(seed):
    rng = get_rng(seed)
    worst = 0.0
    for _ in range(20):
        T = QMatrixOperator(rand_qmatrix(3, seed=rng))
        s = 3.0 * rand_quaternion(seed=rng)
        p = 3.0 * rand_quaternion(seed=rng)
        worst = max(worst, s_resolvent_equation_residual(T, s, p))
    return worst


@register_check('frac-power-routes', 1e-6,
                "spectral vs Balakrishnan vs Komatsu fractional powers")
def check_frac_power_routes(seed):
    rng = get_rng(seed)
    worst = 0.0
    for _ in range(3):
        T = QMatrixOperator(rand_sectorial_qmatrix(4, seed=rng))
        scale = max(1.0, T.op_norm())
        for alpha in (0.3, 0.5, 0.7):
            cc = cross_check(T, alpha, methods=['spectral', 'balakrishnan',
                                                'komatsu'])
            worst = max(worst, cc.max_delta / scale)
        half = frac_power(T, 0.5).operator
        worst = max(worst, _rel(half @ half, T))
    return worst


@register_check('laws-of-exponents', 1e-6,
                "T^a T^b = T^(a+b) and the angle of T^a")
def check_laws_of_exponents(seed):
    rng = get_rng(seed)
    T = QMatrixOperator(rand_sectorial_qmatrix(4, angle=np.pi / 2, seed=rng))
    a, b = 0.3, 0.4
    Ta = frac_power(T, a).operator
    Tb = frac_power(T, b).operator
    Tab = frac_power(T, a + b).operator
    worst = _rel(Ta @ Tb, Tab)
    omega = sectorial_report(T, angles=()).omega_est
    omega_a = sectorial_report(Ta, angles=()).omega_est
    return max(worst, abs(omega_a - a * omega))


@register_check('spectral-mapping', 1e-6,
                "sigma_S(f(T)) = f(sigma_S(T))")
def check_spectral_mapping(seed):
    rng = get_rng(seed)
    worst = 0.0
    fns = [parse_expression(t) for t in ('s^2', '1/(1+s)', 'pow(s,0.5)')]
    for _ in range(3):
        T = QMatrixOperator(rand_sectorial_qmatrix(3, seed=rng))
        for f in fns:
            worst = max(worst, spectral_mapping_check(f, T).distance)
    return worst


@register_check('nabla-symbol', 1e-12,
                "trace, determinant and square of the nabla symbol")
def check_nabla_symbol(seed):
    tab = symbol_table((16, 16, 16))
    nu2 = tab.nu**2
    top = max(1.0, float(nu2.max()))
    P_plus, P_minus = tab.projectors()
    return max(float(np.max(np.abs(tab.trace()))) / top,
               float(np.max(np.abs(tab.det() + nu2))) / top,
               tab.square_residual() / top,
               float(np.max(np.abs(P_plus @ P_plus - P_plus))))


@register_check('nabla-routes', 1e-6,
                "S-resolvent quadrature vs closed form of f_alpha(nabla)")
def check_nabla_routes(seed):
    v = SpectralField.random((8, 8, 8), seed=seed)
    return max(rel_l2_error(frac_nabla_quadrature(v, alpha),
                            frac_nabla_closed(v, alpha))
               for alpha in (0.3, 0.5, 0.7))


@register_check('div-vec', 1e-12,
                "div Vec f_alpha(nabla) v = -(-Delta)^((alpha+1)/2) v / 2")
def check_div_vec(seed):
    v = SpectralField.gaussian((16, 16, 16), width=0.8)
    return max(div_vec_identity(v, alpha) / v.l2_norm()
               for alpha in (0.3, 0.5, 0.7))


@register_check('heat-forms', 1e-10,
                "direct vs divergence form of the fractional heat equation")
def check_heat_forms(seed):
    u = SpectralField.gaussian((16, 16, 16), width=0.8)
    cfg = EvolutionConfig(0.75, 1e-3, 20, form='both')
    res = run_simulation(u, cfg)
    # a single mode decays like exp(-|xi|^(2 alpha) t)
    w = SpectralField.single_mode((1, 2, 0), (16, 16, 16))
    w1 = heat_step_direct(w, cfg.replace(form='direct', dt=0.1))
    decay = np.exp(-0.1 * 5.0**0.75)
    mode_err = float(np.max(np.abs(w1.values - decay * w.values)))
    return max(res.max_form_delta / u.l2_norm(), mode_err,
               form_symbol_residual(u.dims, u.box, 0.75))


@register_check('varcoef', 1e-6,
                "Vec f_alpha(T) by conjugation vs S-resolvent quadrature")
def check_varcoef(seed):
    op = LogGridOperator((16, 16, 16))
    x1, x2, x3 = op.x_grid()
    v = np.exp(-2.0 * (x1**2 + x2**2 + x3**2))
    worst = 0.0
    for alpha in (0.5, 1.0):
        res = varcoef_vec_fracpower(op, v, alpha)
        worst = max(worst, res.delta / max(1.0, np.abs(res.vec).max()))
    half_T = 0.5 * op.apply_T_conjugated(v)[..., 1:]
    res = varcoef_vec_fracpower(op, v, 1.0)
    return max(worst, float(np.max(np.abs(res.vec - half_T))))


@register_check('spectrum-consistency', 1e-8,
                "reported spheres are singular and axially symmetric")
def check_spectrum_consistency(seed):
    rng = get_rng(seed)
    worst = 0.0
    for _ in range(3):
        T = QMatrixOperator(rand_qmatrix(4, seed=rng))
        scale = max(1.0, T.op_norm()**2)
        for sph in s_spectrum(T):
            axes = rand_quaternion(12, seed=rng)
            axes[:, 0] = 0.0
            axes /= np.linalg.norm(axes, axis=1, keepdims=True)
            for I in axes:
                s = from_slice_parts(sph.u, sph.v, I)
                worst = max(worst, min_singular_value(T, s) / scale)
    return worst


# --------------------------------- runner ---------------------------------- #

def run_check(name, seed=0):
    check = _CHECKS[name]
    t0 = time.perf_counter()
    detail = ''
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        try:
            value = float(check.fn(seed))
        except Exception as e:
            value, detail = np.inf, f"{type(e).__name__}: {e}"
    if caught and not detail:
        detail = f"{len(caught)} warning(s): {caught[0].message}"
    return CheckResult(name, bool(value <= check.tol), value, check.tol,
                       time.perf_counter() - t0, detail)


def run_selftest(names=None, seed=0, progbar=False):
    """Run the named checks (all by default) and return their results.
    """
    names = list_checks() if names is None else list(names)
    unknown = sorted(set(names) - set(_CHECKS))
    if unknown:
        raise ValueError(f"Unknown checks {unknown}, choose from "
                         f"{list_checks()}.")
    return [run_check(name, seed)
            for name in _progbar(names, progbar=progbar, desc='selftest')]


@functools.lru_cache(1)
def _name_width():
    return max(map(len, _CHECKS))


def format_table(results):
    """Human readable pass/fail table.
    """
    w = _name_width()
    lines = [f"{'check':<{w}}  {'result':<6}  {'value':>10}  {'tol':>8}  "
             f"{'time':>7}"]
    for r in results:
        status = 'PASS' if r.passed else 'FAIL'
        line = (f"{r.name:<{w}}  {status:<6}  {r.value:>10.3e}  "
                f"{r.tol:>8.1e}  {r.seconds:>6.2f}s")
        if r.detail:
            line += f"  {r.detail}"
        lines.append(line)
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} checks passed")
    return '\n'.join(lines)
