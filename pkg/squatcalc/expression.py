"""Parse small text expressions into intrinsic slice functions.

Grammar: real literals, the variable ``s``, ``+ - * /``, ``^`` or ``**``
with a real literal exponent, parentheses, and the calls ``pow(x, a)``,
``log(x)``, ``exp(x)`` and ``inv(x)``. For example::

    pow(s, 0.5)
    (1 + s)^-1
    s^2 - 2*s + 5
    log(s) / (s + 3)
    pow(2 - s, 0.5)

The argument of ``log`` and of a non-integer power must be affine in ``s``,
so that its branch cut is a known ray on the real axis.

Expressions are parsed with :mod:`ast` and only the node types above are
accepted. Rational expressions additionally remember their numerator and
denominator as real polynomials, which ``rational_calculus`` consumes.
"""
import ast
import operator

import numpy as np
from numpy.polynomial import Polynomial

from .domain import EVERYWHERE, Punctured, Sector
from .errors import ExpressionError
from .slice import IntrinsicSliceFunction


class Expression(IntrinsicSliceFunction):
    """An intrinsic slice function parsed from text.

    Attributes
    ----------
    text : str
        The source expression.
    rational : None or (numpy.polynomial.Polynomial, Polynomial)
        Numerator and denominator if the expression is a rational function
        of ``s`` with real coefficients.
    """

    __slots__ = ('text', 'rational')

    def __init__(self, text, fn, domain, rational):
        self.text = text
        self.rational = rational
        super().__init__(fn, domain=domain, name=text)

    @property
    def is_rational(self):
        return self.rational is not None

    def __repr__(self):
        return f"Expression({self.text!r})"


class _Node:
    """Compiled sub-expression: complex function, domain and (optionally)
    the rational form.
    """

    __slots__ = ('fn', 'domain', 'rat')

    def __init__(self, fn, domain=EVERYWHERE, rat=None):
        self.fn = fn
        self.domain = domain
        self.rat = rat

    @property
    def is_constant(self):
        return (self.rat is not None and self.rat[0].trim().degree() == 0
                and self.rat[1].trim().degree() == 0)

    def constant_value(self):
        return float(self.rat[0].trim().coef[0] / self.rat[1].trim().coef[0])


def _literal(c):
    c = float(c)
    return _Node(lambda z: np.full(np.shape(z), c, dtype=complex),
                 rat=(Polynomial([c]), Polynomial([1.0])))


_VARIABLE = _Node(lambda z: np.asarray(z, dtype=complex),
                  rat=(Polynomial([0.0, 1.0]), Polynomial([1.0])))


def _zeros_domain(node):
    """Region excluding the zeros of ``node`` when they are known.
    """
    if node.rat is None:
        return EVERYWHERE
    roots = node.rat[0].trim().roots()
    if len(roots) == 0:
        return EVERYWHERE
    return Punctured(roots)


def _cut_domain(node, fn_name):
    """Region on which ``node`` stays off the cut ``(-inf, 0]``. The
    argument of ``log`` and of non-integer powers must be a constant or
    affine in ``s``: ``a s + b`` crosses the cut exactly on ``(-inf, -b/a]``
    for ``a > 0`` and on ``[-b/a, inf)`` for ``a < 0``.
    """
    if node.rat is None:
        raise ExpressionError(f"The argument of {fn_name} must be affine in "
                              "s, got a non-rational expression.")
    num, den = node.rat[0].trim(), node.rat[1].trim()
    if num.degree() == 0 and den.degree() == 0:
        if num.coef[0] / den.coef[0] <= 0:
            raise ExpressionError(f"{fn_name} of a nonpositive constant.")
        return EVERYWHERE
    if den.degree() == 0 and num.degree() == 1:
        b, a = num.coef / den.coef[0]
        return Sector(np.pi, vertex=-b / a, side='right' if a > 0 else 'left')
    raise ExpressionError(
        f"The argument of {fn_name} must be affine in s, got a rational "
        f"function of degree ({num.degree()}, {den.degree()}).")


def _binop(op, a, b):
    domain = a.domain & b.domain
    rat = None
    if op is operator.truediv:
        domain = domain & _zeros_domain(b)
    if a.rat is not None and b.rat is not None:
        (pa, qa), (pb, qb) = a.rat, b.rat
        if op is operator.add:
            rat = (pa * qb + pb * qa, qa * qb)
        elif op is operator.sub:
            rat = (pa * qb - pb * qa, qa * qb)
        elif op is operator.mul:
            rat = (pa * pb, qa * qb)
        else:
            rat = (pa * qb, qa * pb)
    fa, fb = a.fn, b.fn
    return _Node(lambda z: op(fa(z), fb(z)), domain, rat)


def _power(base, exponent):
    if not exponent.is_constant:
        raise ExpressionError("Exponents must be real constants.")
    a = exponent.constant_value()
    fb = base.fn
    if a == int(a):
        n = int(a)
        rat = None
        if base.rat is not None:
            p, q = base.rat
            rat = (p**n, q**n) if n >= 0 else (q**(-n), p**(-n))
        domain = base.domain
        if n < 0:
            domain = domain & _zeros_domain(base)
        return _Node(lambda z: fb(z)**n, domain, rat)
    domain = base.domain & _cut_domain(base, 'power')
    return _Node(lambda z: np.power(fb(z), a), domain)


def _log(arg):
    fa = arg.fn
    return _Node(lambda z: np.log(fa(z)), arg.domain & _cut_domain(arg, 'log'))


def _exp(arg):
    fa = arg.fn
    return _Node(lambda z: np.exp(fa(z)), arg.domain)


def _inv(arg):
    return _binop(operator.truediv, _literal(1.0), arg)


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}

_CALLS = {
    'pow': (2, _power),
    'log': (1, _log),
    'exp': (1, _exp),
    'inv': (1, _inv),
}


class _Compiler(ast.NodeVisitor):

    def generic_visit(self, node):
        raise ExpressionError(
            f"Unsupported syntax {node.__class__.__name__!r} in expression.")

    def visit_Expression(self, node):
        return self.visit(node.body)

    def visit_Constant(self, node):
        if isinstance(node.value, bool) or not isinstance(
                node.value, (int, float)):
            raise ExpressionError(f"Unsupported literal {node.value!r}.")
        return _literal(node.value)

    def visit_Name(self, node):
        if node.id != 's':
            raise ExpressionError(f"Unknown variable {node.id!r}, only 's' "
                                  "is allowed.")
        return _VARIABLE

    def visit_UnaryOp(self, node):
        operand = self.visit(node.operand)
        if isinstance(node.op, ast.UAdd):
            return operand
        if isinstance(node.op, ast.USub):
            return _binop(operator.mul, _literal(-1.0), operand)
        return self.generic_visit(node)

    def visit_BinOp(self, node):
        left, right = self.visit(node.left), self.visit(node.right)
        if isinstance(node.op, ast.Pow):
            return _power(left, right)
        try:
            op = _BINOPS[node.op.__class__]
        except KeyError:
            return self.generic_visit(node)
        return _binop(op, left, right)

    def visit_Call(self, node):
        if not isinstance(node.func, ast.Name) or node.keywords:
            return self.generic_visit(node)
        try:
            nargs, builder = _CALLS[node.func.id]
        except KeyError:
            raise ExpressionError(f"Unknown function {node.func.id!r}, "
                                  f"choose from {sorted(_CALLS)}.")
        if len(node.args) != nargs:
            raise ExpressionError(f"{node.func.id} takes {nargs} argument(s), "
                                  f"got {len(node.args)}.")
        return builder(*map(self.visit, node.args))


def parse_expression(text):
    """Parse ``text`` into an :class:`Expression`.

    Examples
    --------

        >>> f = parse_expression('s^2 + 1')
        >>> f.is_rational
        True
        >>> f(Quaternion(0, 0, 0, 1))
        Quaternion(w=0.0, x=0.0, y=0.0, z=0.0)

    """
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("Empty expression.")
    try:
        tree = ast.parse(text.strip().replace('^', '**'), mode='eval')
    except SyntaxError as e:
        raise ExpressionError(f"Cannot parse {text!r}: {e.msg}.")
    node = _Compiler().visit(tree)
    rat = None
    if node.rat is not None:
        p, q = node.rat[0].trim(), node.rat[1].trim()
        # scale so the denominator has leading coefficient one
        scale = q.coef[-1]
        rat = (p / scale, q / scale)
    return Expression(text, node.fn, node.domain, rat)
