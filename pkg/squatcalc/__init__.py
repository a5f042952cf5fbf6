import functools

from .errors import (
    CommutatorError,
    DimensionError,
    DomainError,
    EnclosureError,
    ExpressionError,
    FormatError,
    QuadratureWarning,
    SectorError,
    SingularError,
    SquatcalcError,
    SSpectrumError,
    StabilityError,
)
from .quaternion import (
    E1,
    E2,
    E3,
    ONE,
    Quaternion,
    parse_quaternion,
    qexp,
    qlog,
    qpow,
    slice_decompose,
    slice_reconstruct,
)
from .slice import (
    IntrinsicSliceFunction,
    LeftSliceFunction,
    RightSliceFunction,
    cauchy_kernel_left,
    cauchy_kernel_right,
    star_left,
    star_right,
)
from .expression import parse_expression
from .qmatrix import (
    QMatrixOperator,
    SpectralSphere,
    s_resolvent_left,
    s_resolvent_right,
    s_spectrum,
)
from .quadrature import QuadSpec
from .contour import (ContourSpec, auto_contour, circle_contour,
                      resolve_contour)
from .calculus import (
    funcalc,
    rational_calculus,
    s_funcalc_left,
    s_funcalc_right,
    spectral_mapping_check,
    spectral_projection,
)
from .fracpower import (
    cross_check,
    frac_power,
    list_frac_power_methods,
    register_frac_power_method,
    sectorial_report,
)
from .field import SpectralField
from .nabla import (
    Splitting,
    div_vec_identity,
    frac_nabla,
    frac_nabla_closed,
    frac_nabla_quadrature,
    nabla_apply,
    s_spectrum_probe_nabla,
    symbol_table,
)
from .heat import (
    EvolutionConfig,
    LogGridOperator,
    heat_step,
    run_simulation,
    varcoef_vec_fracpower,
)
from .io import (
    dumps_result,
    read_field,
    read_matrix,
    write_field,
    write_matrix,
)


__version__ = '0.1.0'


sqrt_operator = functools.partial(frac_power, alpha=0.5)
"""The principal square root ``T^(1/2)`` via the default route.
"""


__all__ = (
    "auto_contour",
    "cauchy_kernel_left",
    "cauchy_kernel_right",
    "circle_contour",
    "CommutatorError",
    "ContourSpec",
    "cross_check",
    "DimensionError",
    "div_vec_identity",
    "DomainError",
    "dumps_result",
    "E1",
    "E2",
    "E3",
    "EnclosureError",
    "EvolutionConfig",
    "ExpressionError",
    "FormatError",
    "frac_nabla",
    "frac_nabla_closed",
    "frac_nabla_quadrature",
    "frac_power",
    "funcalc",
    "heat_step",
    "IntrinsicSliceFunction",
    "LeftSliceFunction",
    "list_frac_power_methods",
    "LogGridOperator",
    "nabla_apply",
    "ONE",
    "parse_expression",
    "parse_quaternion",
    "QMatrixOperator",
    "qexp",
    "qlog",
    "qpow",
    "QuadratureWarning",
    "QuadSpec",
    "Quaternion",
    "rational_calculus",
    "read_field",
    "read_matrix",
    "register_frac_power_method",
    "resolve_contour",
    "RightSliceFunction",
    "run_simulation",
    "s_funcalc_left",
    "s_funcalc_right",
    "s_resolvent_left",
    "s_resolvent_right",
    "s_spectrum",
    "s_spectrum_probe_nabla",
    "SectorError",
    "sectorial_report",
    "SingularError",
    "slice_decompose",
    "slice_reconstruct",
    "SpectralField",
    "spectral_mapping_check",
    "spectral_projection",
    "SpectralSphere",
    "Splitting",
    "sqrt_operator",
    "SquatcalcError",
    "SSpectrumError",
    "StabilityError",
    "star_left",
    "star_right",
    "symbol_table",
    "varcoef_vec_fracpower",
    "write_field",
    "write_matrix",
)
