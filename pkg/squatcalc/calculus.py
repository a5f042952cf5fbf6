"""The S-functional calculus for quaternionic matrices.

For a left slice hyperholomorphic ``f`` and a contour in a slice ``C_I``
enclosing the S-spectrum of ``T``::

    f(T) = 1/(2 pi) int S_L^{-1}(s, T) ds_I f(s),     ds_I = -I ds

and for a right slice function ``f(T) = 1/(2 pi) int f(s) ds_I
S_R^{-1}(s, T)``. The integrals are evaluated by composite Gauss-Legendre
quadrature on the contour, doubling the number of panels until two
successive results agree.
"""
import itertools
import warnings
from typing import NamedTuple

import numpy as np

from .contour import CircleArc, ContourSpec, auto_contour, resolve_contour
from .errors import (
    DomainError,
    EnclosureError,
    QuadratureWarning,
    SSpectrumError,
)
from .parallel import map_chunks
from .qmatrix import (
    INVERTIBILITY_RTOL,
    QMatrixOperator,
    SpectralSphere,
    as_operator,
    complex_adjoint_inverse,
    min_singular_value,
    s_resolvents_batch,
    s_spectrum,
    scalar_times,
    times_scalar,
)
from .quaternion import E1, complex_to_slice, qmul_array
from .slice import (
    IntrinsicSliceFunction,
    LeftSliceFunction,
    RightSliceFunction,
    as_slice_function,
)
from .utils import hausdorff_distance, partition_all, progbar as _progbar


DEFAULT_RTOL = 1e-9
MAX_NODES = 2**16

# complex entries held at once by one chunk of stacked resolvents
_CHUNK_ENTRIES = 2**22


class FunCalcResult(NamedTuple):
    """Outcome of a contour evaluation of ``f(T)``.

    Attributes
    ----------
    operator : QMatrixOperator
        The approximation of ``f(T)`` on the finest node set.
    est_quadrature_error : float
        Max-norm difference between the last two node sets.
    contour : ContourSpec
        The finest contour used.
    """
    operator: QMatrixOperator
    est_quadrature_error: float
    contour: ContourSpec

    @property
    def n_nodes(self):
        return self.contour.n_nodes


def _chunk_integral(entries, s, w, side):
    """Sum of ``S_L(s_k) w_k`` (left) or ``w_k S_R(s_k)`` (right) over one
    chunk of nodes, in the embedding.
    """
    T = QMatrixOperator(entries)
    R = s_resolvents_batch(T, s, side=side)
    if side == 'left':
        return times_scalar(R, w).sum(axis=0)
    return scalar_times(w, R).sum(axis=0)


def _node_weights(f, contour, side):
    z, dz = contour.nodes()
    axis = contour.axis
    s = complex_to_slice(z, axis)
    ds_i = complex_to_slice(-1j * dz, axis)
    fv = f.on_slice(z, axis)
    if side == 'left':
        w = qmul_array(ds_i, fv)
    else:
        w = qmul_array(fv, ds_i)
    return s, w / (2 * np.pi)


def _integrate(f, T, contour, side, parallel=False, chunk_size=None):
    s, w = _node_weights(f, contour, side)
    n2 = 2 * T.n
    if chunk_size is None:
        chunk_size = max(1, _CHUNK_ENTRIES // n2**2)
    chunks = [(T.entries, s[list(ix)], w[list(ix)], side)
              for ix in partition_all(chunk_size, range(len(s)))]
    partials = map_chunks(_chunk_integral, chunks, parallel=parallel)
    # fixed order summation
    total = np.zeros((n2, n2), dtype=complex)
    for p in partials:
        total += p
    return total


def _check_side(f, side):
    f = as_slice_function(f)
    if isinstance(f, IntrinsicSliceFunction):
        return f if side == 'left' else f.as_right()
    if side == 'left' and not isinstance(f, LeftSliceFunction):
        raise TypeError(f"The left calculus needs a left slice function, got "
                        f"{f!r}.")
    if side == 'right' and not isinstance(f, RightSliceFunction):
        raise TypeError(f"The right calculus needs a right slice function, "
                        f"got {f!r}.")
    return f


def _funcalc(f, T, contour, side, rtol, max_nodes, adaptive, parallel,
             chunk_size, progbar, allow_outside=False):
    T = as_operator(T)
    f = _check_side(f, side)
    spectrum = s_spectrum(T)
    if contour is None:
        contour = auto_contour(spectrum, f.domain)
    contour = resolve_contour(contour, spectrum, max_nodes)
    contour.check_encloses(spectrum, allow_outside=allow_outside)

    prev = _integrate(f, T, contour, side, parallel, chunk_size)
    for _ in _progbar(itertools.count(), progbar, desc='quadrature'):
        finer = contour.refined()
        cur = _integrate(f, T, finer, side, parallel, chunk_size)
        err = float(np.max(np.abs(complex_adjoint_inverse(cur) -
                                  complex_adjoint_inverse(prev))))
        scale = max(1.0, float(np.max(np.abs(cur))))
        if not adaptive or err <= rtol * scale:
            contour = finer
            break
        if 2 * finer.n_nodes > max_nodes:
            warnings.warn(
                f"Contour quadrature of {f.name} stopped at {finer.n_nodes} "
                f"nodes with estimated error {err:.3e} (rtol={rtol:.1e}).",
                QuadratureWarning)
            contour = finer
            break
        prev, contour = cur, finer

    return FunCalcResult(QMatrixOperator.from_complex_adjoint(cur), err,
                         contour)


def s_funcalc_left(f, T, contour=None, rtol=DEFAULT_RTOL, max_nodes=MAX_NODES,
                   adaptive=True, parallel=False, chunk_size=None,
                   progbar=False):
    """Evaluate ``f(T)`` with the left S-functional calculus.

    Parameters
    ----------
    f : LeftSliceFunction, IntrinsicSliceFunction or callable
        The function, defined on a neighbourhood of the contour and its
        interior.
    T : QMatrixOperator or array_like
        The operator.
    contour : ContourSpec, optional
        Integration path; by default built by :func:`auto_contour` from the
        S-spectrum and the domain of ``f``.
    rtol : float, optional
        Relative tolerance between successive panel doublings.
    max_nodes : int, optional
        Stop doubling (with a :class:`QuadratureWarning`) beyond this.
    adaptive : bool, optional
        If false, evaluate on the given contour and its refinement only.
        The given contour is first refined until its nodes resolve the
        S-spectrum.
    parallel : bool, int or pool, optional
        Evaluate resolvent chunks on a pool, see
        :func:`squatcalc.parallel.parse_parallel_arg`.
    chunk_size : int, optional
        Number of nodes per chunk of stacked resolvents.
    progbar : bool, optional
        Show a ``tqdm`` bar over the doubling levels.

    Returns
    -------
    FunCalcResult

    Raises
    ------
    EnclosureError
        If the contour does not enclose every spectral sphere.
    DomainError
        If ``f`` is not defined on the contour.
    """
    return _funcalc(f, T, contour, 'left', rtol, max_nodes, adaptive,
                    parallel, chunk_size, progbar)


def s_funcalc_right(f, T, contour=None, rtol=DEFAULT_RTOL,
                    max_nodes=MAX_NODES, adaptive=True, parallel=False,
                    chunk_size=None, progbar=False):
    """Evaluate ``f(T)`` with the right S-functional calculus, see
    :func:`s_funcalc_left` for the parameters.
    """
    return _funcalc(f, T, contour, 'right', rtol, max_nodes, adaptive,
                    parallel, chunk_size, progbar)


def funcalc(f, T, side='left', **kwargs):
    """Dispatch to :func:`s_funcalc_left` or :func:`s_funcalc_right`.
    """
    if side == 'left':
        return s_funcalc_left(f, T, **kwargs)
    if side == 'right':
        return s_funcalc_right(f, T, **kwargs)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}.")


# --------------------------- rational functions ---------------------------- #

def poly_of(coeffs, T):
    """``sum_k coeffs[k] T^k`` for real coefficients (lowest first), by
    Horner's rule.
    """
    T = as_operator(T)
    coeffs = np.asarray(coeffs, dtype=float)
    out = QMatrixOperator.zeros(T.n)
    eye = QMatrixOperator.identity(T.n)
    for c in coeffs[::-1]:
        out = out @ T + eye * c
    return out


def _pole_factors(den, atol=1e-12):
    """Split the real polynomial ``den`` into the leading coefficient, its
    real roots and the upper half plane members of its conjugate root
    pairs.
    """
    coeffs = np.trim_zeros(np.asarray(den, dtype=float), 'b')
    if len(coeffs) == 0:
        raise DomainError("Zero denominator.")
    roots = np.roots(coeffs[::-1]) if len(coeffs) > 1 else np.array([])
    is_real = np.abs(roots.imag) <= atol * np.maximum(1.0, np.abs(roots))
    return coeffs[-1], roots[is_real].real, roots[~is_real & (roots.imag > 0)]


def rational_calculus(r, T):
    """Evaluate an intrinsic rational function at ``T`` through the
    factorisation of its denominator into ``(T - lambda I)`` and ``Q_p(T)
    = T^2 - 2 Re(p) T + |p|^2 I`` factors.

    Parameters
    ----------
    r : Expression or (array_like, array_like)
        A parsed rational expression, or numerator and denominator real
        coefficients (lowest order first).
    T : QMatrixOperator

    Raises
    ------
    SSpectrumError
        If a pole of ``r`` lies in the S-spectrum of ``T``.
    """
    T = as_operator(T)
    if hasattr(r, 'rational'):
        if r.rational is None:
            raise DomainError(f"{r!r} is not a rational function.")
        num, den = r.rational[0].coef, r.rational[1].coef
    else:
        num, den = r
    lead, real_roots, pairs = _pole_factors(den)
    scale = max(1.0, T.op_norm()**2)
    out = poly_of(num, T) / lead
    eye = QMatrixOperator.identity(T.n)
    for lam in real_roots:
        if min_singular_value(T, lam) <= INVERTIBILITY_RTOL * scale:
            raise SSpectrumError(f"Pole {lam:.6g} lies in the S-spectrum.")
        out = out @ (T - eye * lam).inverse()
    for p in pairs:
        if min_singular_value(T, [p.real, p.imag, 0, 0]) <= (
                INVERTIBILITY_RTOL * scale):
            raise SSpectrumError(f"Pole sphere [{p:.6g}] lies in the "
                                 "S-spectrum.")
        Q = T @ T - T * (2 * p.real) + eye * abs(p)**2
        out = out @ Q.inverse()
    return out


# --------------------------- spectral projections -------------------------- #

def _match_spheres(subset, spectrum, atol=1e-6):
    chosen = []
    for sph in subset:
        u, v = float(sph[0]), abs(float(sph[1]))
        d = [np.hypot(s.u - u, s.v - v) for s in spectrum]
        if not d or min(d) > atol * max(1.0, np.hypot(u, v)):
            raise EnclosureError(f"({u:.6g}, {v:.6g}) is not a sphere of the "
                                 "S-spectrum.")
        chosen.append(spectrum[int(np.argmin(d))])
    return list(dict.fromkeys(chosen))


def isolating_contour(selected, spectrum, axis=None, **kwargs):
    """Small circles around the ``selected`` spheres, each of radius half
    the distance to the nearest other sphere representative.
    """
    reps = np.array([complex(s.u, sg * s.v) for s in spectrum
                     for sg in ((1,) if s.v == 0 else (1, -1))])
    loops = []
    for sph in selected:
        z = complex(sph.u, sph.v)
        others = reps[np.abs(reps - z) > 0]
        r = 0.5 * (np.min(np.abs(others - z)) if len(others) else
                   max(1.0, abs(z)))
        arc = CircleArc(z, r)
        loops.append((arc,))
        if sph.v > 0:
            loops.append((arc.mirrored(),))
    return ContourSpec(loops, axis=E1 if axis is None else axis, **kwargs)


def spectral_projection(T, spheres=None, contour=None, **kwargs):
    """The Riesz projection ``E = 1/(2 pi) int ds_I S_R^{-1}(s, T)`` onto
    the invariant subspace of the selected part of the S-spectrum.

    Parameters
    ----------
    T : QMatrixOperator
    spheres : sequence of (u, v), optional
        The spectral spheres to keep. Either this or ``contour`` must be
        given; with only ``spheres`` an isolating contour is built.
    contour : ContourSpec, optional
        A contour separating the chosen spheres from the rest.

    Raises
    ------
    EnclosureError
        If the contour passes too close to, or winds around only part of,
        the spectrum.
    """
    T = as_operator(T)
    spectrum = s_spectrum(T)
    if contour is None:
        if spheres is None:
            raise ValueError("Give the spheres to project on or a contour.")
        selected = _match_spheres(spheres, spectrum)
        if not selected:
            return QMatrixOperator.zeros(T.n)
        contour = isolating_contour(selected, spectrum)
    one = IntrinsicSliceFunction(
        lambda z: np.ones(np.shape(z), dtype=complex), name='1')
    return _funcalc(one, T, contour, 'right',
                    kwargs.pop('rtol', DEFAULT_RTOL),
                    kwargs.pop('max_nodes', MAX_NODES), True,
                    kwargs.pop('parallel', False), None, False,
                    allow_outside=True).operator


# ---------------------------- spectral mapping ----------------------------- #

class MappingReport(NamedTuple):
    distance: float
    passed: bool
    image: list
    spectrum: list


def sphere_distance(a, b):
    """Hausdorff distance between two lists of spheres, measured on their
    ``(u, v)`` representatives.
    """
    return hausdorff_distance([complex(s[0], abs(s[1])) for s in a],
                              [complex(s[0], abs(s[1])) for s in b])


def spectral_mapping_check(f, T, tol=1e-6, **kwargs):
    """Compare ``f(sigma_S(T))`` with ``sigma_S(f(T))``.

    Returns
    -------
    MappingReport
        The Hausdorff distance between the two sphere sets, whether it is
        below ``tol``, and both sets.
    """
    T = as_operator(T)
    f = as_slice_function(f)
    if not isinstance(f, IntrinsicSliceFunction):
        raise TypeError("The spectral mapping check needs an intrinsic "
                        f"function, got {f!r}.")
    spectrum = s_spectrum(T)
    w = f.complex_values(np.array([s.complex for s in spectrum]))
    image = [SpectralSphere(float(x.real), float(abs(x.imag)))
             for x in np.atleast_1d(w)]
    fT = s_funcalc_left(f, T, **kwargs).operator
    spec_fT = s_spectrum(fT)
    d = sphere_distance(image, spec_fT)
    return MappingReport(d, bool(d <= tol), image, spec_fT)
