"""Bracketing, bisection and safeguarded Newton iteration."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..errors import ConvergenceError

__all__ = ["last_sign_change", "bisect", "safe_newton"]


def last_sign_change(f: Callable[[float], float], lo: float, hi: float, num: int = 400):
    """Scan ``f`` on a log grid over [lo, hi] for the largest upward crossing.

    Returns a bracket ``(a, b)`` with ``f(a) <= 0 < f(b)``, or None when the
    sign never changes from non-positive to positive.
    """
    grid = np.geomspace(lo, hi, num)
    vals = [f(float(r)) for r in grid]
    for k in range(num - 1, 0, -1):
        if vals[k - 1] <= 0.0 < vals[k]:
            return float(grid[k - 1]), float(grid[k])
    return None


def bisect(f: Callable[[float], float], lo: float, hi: float, rtol: float = 0.0, maxiter: int = 2000) -> float:
    """Root of ``f`` in a sign-changing bracket.

    With ``rtol = 0`` the bracket is halved until it cannot shrink any more in
    double precision, which leaves |f(root)| at the level of rounding error.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValueError(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or (hi - lo) <= rtol * abs(mid):
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    else:
        raise ConvergenceError("bisection did not converge")
    return lo if abs(flo) <= abs(fhi) else hi


def safe_newton(
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    lo: float,
    hi: float,
    x0: float | None = None,
    xtol: float = 4e-16,
    maxiter: int = 200,
) -> float:
    """Newton iteration that falls back to bisection when a step leaves [lo, hi]."""
    flo = f(lo)
    fhi = f(hi)
    if flo * fhi > 0.0:
        raise ValueError("root not bracketed")
    if flo > 0.0:
        lo, hi = hi, lo  # keep f(lo) <= 0
    x = 0.5 * (lo + hi) if x0 is None else x0
    for _ in range(maxiter):
        fx = f(x)
        if fx == 0.0:
            return x
        if fx < 0.0:
            lo = x
        else:
            hi = x
        d = fprime(x)
        step_ok = d != 0.0 and math.isfinite(d)
        x_new = x - fx / d if step_ok else 0.5 * (lo + hi)
        if not (min(lo, hi) < x_new < max(lo, hi)):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= xtol * max(abs(x_new), 1e-300):
            return x_new
        x = x_new
    raise ConvergenceError("safeguarded Newton did not converge")
