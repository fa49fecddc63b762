"""Generalized and Kantorovich exponential sampling operators.

>>> from expsamp import MellinBSpline, OperatorParams, kantorovich_apply, parse_signal
>>> k = MellinBSpline(2)
>>> round(kantorovich_apply(k, parse_signal("log"), OperatorParams(10.0), 2.0), 6)
0.743147
"""

__version__ = "0.1.0"

from .diagnostics import (
    ModulusBoundReport,
    RateEstimate,
    RepresentationReport,
    VoronovskayaResult,
    modulus_bound_check,
    representation_decompose,
    saturation_estimate,
    sup_error_grid,
    voronovskaya_residual,
)
from .kernels import (
    KernelSpec,
    MellinBSpline,
    MellinFejer,
    eval_bspline,
    eval_fejer,
    kernel_eval,
    mellin_transform_closed_form,
    numerical_mellin_transform,
    parse_kernel,
)
from .moments import (
    MomentReport,
    PoissonReport,
    discrete_moment,
    moment_report,
    partition_of_unity_check,
    poisson_condition_check,
)
from .operators import OperatorParams, apply_on_grid, classical_apply, kantorovich_apply
from .signals import (
    MellinDerivativeSpec,
    PiecewiseSignal,
    Piece,
    exp_mean,
    log_modulus,
    mellin_derivative,
    parse_signal,
    signal_eval,
)
from .truncation import (
    DEFAULT_TRUNCATION,
    ExactSupport,
    TailTolerance,
    TruncationError,
    WindowTerms,
    parse_truncation,
)

__all__ = [
    "__version__",
    "ModulusBoundReport",
    "RateEstimate",
    "RepresentationReport",
    "VoronovskayaResult",
    "modulus_bound_check",
    "representation_decompose",
    "saturation_estimate",
    "sup_error_grid",
    "voronovskaya_residual",
    "KernelSpec",
    "MellinBSpline",
    "MellinFejer",
    "eval_bspline",
    "eval_fejer",
    "kernel_eval",
    "mellin_transform_closed_form",
    "numerical_mellin_transform",
    "parse_kernel",
    "MomentReport",
    "PoissonReport",
    "discrete_moment",
    "moment_report",
    "partition_of_unity_check",
    "poisson_condition_check",
    "OperatorParams",
    "apply_on_grid",
    "classical_apply",
    "kantorovich_apply",
    "MellinDerivativeSpec",
    "PiecewiseSignal",
    "Piece",
    "exp_mean",
    "log_modulus",
    "mellin_derivative",
    "parse_signal",
    "signal_eval",
    "DEFAULT_TRUNCATION",
    "ExactSupport",
    "TailTolerance",
    "TruncationError",
    "WindowTerms",
    "parse_truncation",
]
