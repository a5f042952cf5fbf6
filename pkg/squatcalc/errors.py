"""Exception and warning types raised throughout ``squatcalc``.
"""


class SquatcalcError(Exception):
    """Base class for all errors raised by ``squatcalc``.
    """


class DomainError(SquatcalcError, ValueError):
    """An argument lies outside the domain of a function, e.g. on the cut
    ``(-inf, 0]`` of the logarithm or outside a slice function's region.
    """


class ExpressionError(DomainError):
    """A function expression could not be parsed.
    """


class SingularError(SquatcalcError, ArithmeticError):
    """A kernel or operator is numerically singular.
    """


class SSpectrumError(SingularError):
    """The point ``s`` belongs (numerically) to the S-spectrum of ``T``.
    """


class CommutatorError(SquatcalcError, ValueError):
    """The commuting-component path was requested for an operator whose
    components do not commute.
    """


class EnclosureError(SquatcalcError, ValueError):
    """A contour passes too close to, or fails to enclose, the S-spectrum.
    """


class SectorError(SquatcalcError, ValueError):
    """The S-spectrum touches the cut ``(-inf, 0]`` or the operator is not
    sectorial.
    """


class StabilityError(SquatcalcError, ValueError):
    """An explicit time step violates its stability bound.
    """


class DimensionError(SquatcalcError, ValueError):
    """Operand shapes do not agree.
    """


class QuadratureWarning(UserWarning):
    """A quadrature did not reach its requested tolerance.
    """


class FormatError(SquatcalcError, ValueError):
    """A matrix or field file is malformed.
    """
