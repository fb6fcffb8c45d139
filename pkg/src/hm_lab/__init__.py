"""Numerical laboratory for a one-parameter deformation of the AdS soliton.

The metrics g = dr^2/V + V dphi^2 + r^2 sum dtheta_i^2 with
V = (r^2/ell^2)(1 + a r^(1-n) - r0^n r^(-n)) are examined for constant scalar
curvature, smooth closing at r_plus, static extensions, a complex structure
in even fiber dimension, and their Hawking-Horowitz and Hamiltonian energies.
"""

from .errors import (
    ConvergenceError,
    DomainError,
    HMLabError,
    InversionError,
    OutOfChartError,
    StepTooLargeError,
    UnsupportedDimensionError,
)
from .geometry import ChartPoint, CurvatureBundle, SolitonParams, Source, eval_profile
from .soliton import RegularizedSoliton, find_r_plus, period_beta, regularize

__version__ = "0.1.0"

__all__ = [
    "ChartPoint",
    "ConvergenceError",
    "CurvatureBundle",
    "DomainError",
    "HMLabError",
    "InversionError",
    "OutOfChartError",
    "RegularizedSoliton",
    "SolitonParams",
    "Source",
    "StepTooLargeError",
    "UnsupportedDimensionError",
    "eval_profile",
    "find_r_plus",
    "period_beta",
    "regularize",
]
