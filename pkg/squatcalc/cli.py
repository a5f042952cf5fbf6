"""The ``squatcalc`` command.

Results go to ``--out`` or standard output, diagnostics (warnings, errors,
the self test table) to standard error. Exit status: 0 on success, 1 for
numerical domain errors such as a spectrum touching the negative axis, 2
for unreadable or malformed input and bad arguments.
"""
import argparse
import math
import os
import sys
import warnings

from .calculus import funcalc as _funcalc
from .contour import ContourSpec, auto_contour, circle_contour
from .errors import ExpressionError, FormatError, SquatcalcError
from .expression import parse_expression
from .field import SpectralField
from .fracpower import (cross_check, frac_power, list_frac_power_methods,
                        sectorial_report)
from .heat import (FORMS, SCHEMES, EvolutionConfig, initial_condition,
                   run_simulation)
from .io import (dumps_norms_csv, dumps_result, read_field, read_matrix,
                 write_field)
from .nabla import (div_vec, frac_laplacian, frac_nabla, laplacian,
                    nabla_apply)
from .qmatrix import s_spectrum
from .quadrature import QuadSpec


# ------------------------------ flag parsing ------------------------------- #

def _positive_float(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (x > 0.0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return x


def _nonnegative_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return n


def _triple(conv):
    """Parse ``'a'`` or ``'a,b,c'`` into three values."""
    def parse(text):
        parts = text.split(',')
        if len(parts) not in (1, 3):
            raise argparse.ArgumentTypeError(
                f"expected one or three comma separated values, got {text!r}")
        vals = tuple(conv(p) for p in parts)
        return vals * 3 if len(vals) == 1 else vals
    return parse


def _grid_size(text):
    n = _nonnegative_int(text)
    if n < 2:
        raise argparse.ArgumentTypeError(f"grid size must be >= 2, got {n}")
    return n


def _circle(text):
    try:
        u, v, r = (float(x) for x in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'u,v,r', got {text!r}")
    if not r > 0.0:
        raise argparse.ArgumentTypeError(f"radius must be positive, got {r}")
    return u, v, r


def _parallel(text):
    low = text.lower()
    if low in ('true', 'false'):
        return low == 'true'
    if low in ('auto', 'dask'):
        return low
    try:
        return _nonnegative_int(text)
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError(
            f"expected auto, true, false, dask or a worker count, got "
            f"{text!r}")


def _emit(text, out=None):
    if out is None:
        sys.stdout.write(text)
        if not text.endswith('\n'):
            sys.stdout.write('\n')
        return
    with open(out, 'w') as f:
        f.write(text if text.endswith('\n') else text + '\n')


def _emit_json(result, out=None):
    _emit(dumps_result(result), out)


# ------------------------------- commands ---------------------------------- #

def cmd_spectrum(args):
    _emit_json(s_spectrum(read_matrix(args.matrix)), args.out)
    return 0


def _sized(contour, nodes):
    """Rebuild ``contour`` with enough panels for about ``nodes`` nodes."""
    per_panel = len(contour.arcs) * contour.order
    panels = max(1, math.ceil(nodes / per_panel))
    return ContourSpec(contour.loops, contour.axis, panels, contour.order)


def cmd_funcalc(args):
    T = read_matrix(args.matrix)
    f = parse_expression(args.expr)
    if args.circle is not None:
        u, v, r = args.circle
        contour = circle_contour(complex(u, v), r)
    else:
        contour = auto_contour(s_spectrum(T), f.domain)
    if args.nodes:
        contour = _sized(contour, args.nodes)
    res = _funcalc(f, T, side=args.side, contour=contour, rtol=args.rtol,
                   parallel=args.parallel, progbar=args.progbar)
    _emit_json({'operator': res.operator,
                'est_quadrature_error': res.est_quadrature_error,
                'contour_used': res.contour}, args.out)
    return 0


def cmd_fracpow(args):
    T = read_matrix(args.matrix)
    quad = QuadSpec(panels=args.panels, order=args.order)
    res = frac_power(T, args.alpha, args.method, quad, args.parallel)
    report = {'method': res.method,
              'alpha': res.alpha,
              'operator': res.operator,
              'diagnostics': res.diagnostics,
              'quadrature': quad,
              'sectorial': sectorial_report(T)}
    if args.check:
        report['deltas'] = cross_check(T, args.alpha, quad=quad,
                                       parallel=args.parallel).deltas
    _emit_json(report, args.out)
    return 0


def cmd_field_gen(args):
    dims, box = args.grid, args.box
    if args.init == 'random':
        u = SpectralField.random(dims, box, real=args.real, seed=args.seed)
    else:
        u = initial_condition(args.init, dims, box)
    write_field(args.out, u)
    return 0


_FIELD_OPS = ('nabla', 'laplacian', 'frac-nabla', 'frac-laplacian',
              'div-vec')


def cmd_field_apply(args):
    v = read_field(args.input)
    if args.op == 'nabla':
        w = nabla_apply(v)
    elif args.op == 'laplacian':
        w = laplacian(v)
    elif args.op == 'frac-nabla':
        w = frac_nabla(v, args.alpha, method=args.method)
    elif args.op == 'frac-laplacian':
        w = frac_laplacian(v, args.alpha)
    else:
        w = SpectralField(div_vec(v, args.alpha), v.box)
    write_field(args.out, w)
    return 0


def cmd_field_norm(args):
    v = read_field(args.input)
    lo, hi = v.minmax()
    _emit_json({'dims': v.dims, 'box': v.box, 'l2': v.l2_norm(),
                'min': lo, 'max': hi, 'real': v.is_real()}, args.out)
    return 0


def cmd_heat(args):
    cfg = EvolutionConfig(args.alpha, args.dt, args.steps, scheme=args.scheme,
                          form=args.form)
    u = initial_condition(args.init, args.grid, args.box)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    res = run_simulation(u, cfg, out_dir=args.out, snap_every=args.snap_every,
                         progbar=args.progbar)
    if not args.out:
        _emit(dumps_norms_csv(res.rows))
    return 0


def cmd_selftest(args):
    from .selftest import format_table, list_checks, run_selftest

    if args.list:
        _emit('\n'.join(list_checks()))
        return 0
    results = run_selftest(args.checks or None, seed=args.seed,
                           progbar=args.progbar)
    print(format_table(results), file=sys.stderr)
    return 0 if all(r.passed for r in results) else 1


# -------------------------------- parser ----------------------------------- #

def build_parser():
    parser = argparse.ArgumentParser(
        prog='squatcalc',
        description="Quaternionic S-spectrum functional calculus, fractional "
                    "powers and fractional heat evolution.")
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    p = sub.add_parser('spectrum', help="S-spectrum of a matrix as spheres")
    p.add_argument('--matrix', required=True)
    p.add_argument('--out')
    p.set_defaults(run=cmd_spectrum)

    p = sub.add_parser('funcalc', help="f(T) by the S-functional calculus")
    p.add_argument('--matrix', required=True)
    p.add_argument('--expr', required=True,
                   help="e.g. 'pow(s,0.5)', '1/(1+s)', 'exp(s)'")
    g = p.add_mutually_exclusive_group()
    g.add_argument('--contour', choices=['auto'], default='auto')
    g.add_argument('--circle', type=_circle, metavar='U,V,R',
                   help="circle of radius R around U+Iv")
    p.add_argument('--nodes', type=_nonnegative_int, default=0,
                   help="initial number of quadrature nodes")
    p.add_argument('--side', choices=['left', 'right'], default='left')
    p.add_argument('--rtol', type=_positive_float, default=1e-10)
    p.add_argument('--parallel', type=_parallel, default=False)
    p.add_argument('--progbar', action='store_true')
    p.add_argument('--out')
    p.set_defaults(run=cmd_funcalc)

    p = sub.add_parser('fracpow', help="fractional power T^alpha")
    p.add_argument('--matrix', required=True)
    p.add_argument('--alpha', type=float, required=True)
    p.add_argument('--method', choices=list_frac_power_methods(),
                   default='spectral')
    p.add_argument('--check', action='store_true',
                   help="also report the deltas between all routes")
    p.add_argument('--panels', type=_grid_size, default=64)
    p.add_argument('--order', type=_grid_size, default=16)
    p.add_argument('--parallel', type=_parallel, default=False)
    p.add_argument('--out')
    p.set_defaults(run=cmd_fracpow)

    p = sub.add_parser('field', help="generate, transform and measure "
                                     "SQF1 fields")
    fsub = p.add_subparsers(dest='field_command', metavar='action')
    fsub.required = True

    q = fsub.add_parser('gen')
    q.add_argument('--grid', type=_triple(_grid_size), default=(16,) * 3)
    q.add_argument('--box', type=_triple(_positive_float),
                   default=(2 * math.pi,) * 3)
    q.add_argument('--init', default='gauss',
                   help="gauss, random, modes:<k1,k2,k3,amp;...> or "
                        "file:<path>")
    q.add_argument('--real', action='store_true',
                   help="random scalar values only")
    q.add_argument('--seed', type=_nonnegative_int, default=None)
    q.add_argument('--out', required=True)
    q.set_defaults(run=cmd_field_gen)

    q = fsub.add_parser('apply')
    q.add_argument('--in', dest='input', required=True)
    q.add_argument('--op', choices=_FIELD_OPS, required=True)
    q.add_argument('--alpha', type=float, default=0.5)
    q.add_argument('--method', choices=['closed', 'quadrature',
                                        'measurable'], default='closed')
    q.add_argument('--out', required=True)
    q.set_defaults(run=cmd_field_apply)

    q = fsub.add_parser('norm')
    q.add_argument('--in', dest='input', required=True)
    q.add_argument('--out')
    q.set_defaults(run=cmd_field_norm)

    p = sub.add_parser('heat', help="fractional heat evolution")
    p.add_argument('--alpha', type=float, required=True)
    p.add_argument('--grid', type=_triple(_grid_size), default=(32,) * 3)
    p.add_argument('--box', type=_triple(_positive_float),
                   default=(2 * math.pi,) * 3)
    p.add_argument('--dt', type=_positive_float, required=True)
    p.add_argument('--steps', type=_nonnegative_int, required=True)
    p.add_argument('--scheme', choices=SCHEMES, default='exact')
    p.add_argument('--form', choices=FORMS, default='direct')
    p.add_argument('--init', default='gauss',
                   help="gauss, modes:<k1,k2,k3,amp;...> or file:<path>")
    p.add_argument('--snap-every', type=_nonnegative_int, default=0)
    p.add_argument('--progbar', action='store_true')
    p.add_argument('--out', help="output directory; norms.csv goes to "
                                 "standard output without it")
    p.set_defaults(run=cmd_heat)

    p = sub.add_parser('selftest', help="run the numerical self checks")
    p.add_argument('checks', nargs='*')
    p.add_argument('--seed', type=_nonnegative_int, default=0)
    p.add_argument('--list', action='store_true')
    p.add_argument('--progbar', action='store_true')
    p.set_defaults(run=cmd_selftest)

    return parser


def _report(prefix, err):
    print(f"squatcalc: {prefix}: {err}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('default')
        try:
            code = args.run(args)
        except (OSError, FormatError, ExpressionError) as e:
            _report('input error', e)
            code = 2
        except SquatcalcError as e:
            _report(type(e).__name__, e)
            code = 1
        except ValueError as e:
            _report('invalid argument', e)
            code = 2

    for w in caught:
        print(f"squatcalc: {w.category.__name__}: {w.message}",
              file=sys.stderr)
    return code


if __name__ == '__main__':
    sys.exit(main())
