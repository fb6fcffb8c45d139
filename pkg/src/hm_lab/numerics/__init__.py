"""Generic numerical machinery: differences, tensors, roots, limits, quadrature."""

from .differentiate import derivative, gradient, jet, richardson
from .extrapolate import fit_power_tail, loglog_slope, richardson_limit, tail_exponents
from .quadrature import adaptive, torus_integral
from .roots import bisect, last_sign_change, safe_newton
from .tensors import (
    MetricCurvature,
    exterior_derivative_2form,
    metric_curvature,
    nijenhuis,
    workprec,
)

__all__ = [
    "derivative",
    "gradient",
    "jet",
    "richardson",
    "fit_power_tail",
    "loglog_slope",
    "richardson_limit",
    "tail_exponents",
    "adaptive",
    "torus_integral",
    "bisect",
    "last_sign_change",
    "safe_newton",
    "MetricCurvature",
    "exterior_derivative_2form",
    "metric_curvature",
    "nijenhuis",
    "workprec",
]
