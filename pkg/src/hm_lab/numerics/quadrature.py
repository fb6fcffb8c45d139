"""Quadrature: adaptive 1-D integration and periodic tensor-product rules."""

from __future__ import annotations

import itertools
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _integrate

from ..errors import ConvergenceError

__all__ = ["adaptive", "torus_integral"]


def adaptive(f: Callable[[float], float], a: float, b: float, rtol: float = 1e-13, atol: float = 0.0) -> float:
    """Adaptive Gauss-Kronrod integral of a smooth integrand over [a, b]."""
    val, err = _integrate.quad(f, a, b, epsabs=atol, epsrel=rtol, limit=200)
    if not np.isfinite(val) or err > max(atol, 1e3 * rtol * abs(val), 1e-300):
        raise ConvergenceError(f"quadrature error estimate {err:.3e} too large for value {val:.6e}")
    return float(val)


def torus_integral(f: Callable[..., object], periods: Sequence, points_per_dim: int = 1):
    """Integral of a periodic function over the flat torus with the given periods.

    The trapezoid rule is spectrally accurate for smooth periodic integrands; it
    is exact for constants with one node per dimension, which covers the
    rotationally symmetric integrands used by the energy functionals.
    """
    m = int(points_per_dim)
    if m < 1:
        raise ValueError("points_per_dim must be >= 1")
    cell = 1
    for p in periods:
        cell = cell * p
    total = 0
    for idx in itertools.product(range(m), repeat=len(periods)):
        angles = [p * k / m for p, k in zip(periods, idx)]
        total = total + f(*angles)
    return total * cell / m ** len(periods)
