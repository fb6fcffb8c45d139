"""Limits by extrapolation: Richardson tables and power-law tails."""

from __future__ import annotations

from typing import Callable, Sequence

import mpmath
import numpy as np

__all__ = ["richardson_limit", "tail_exponents", "fit_power_tail", "loglog_slope"]


def richardson_limit(f: Callable[[float], float], s: float, orders: Sequence[int] = (1, 2)):
    """Limit of ``f`` at 0+ from samples at s, s/2, s/4, ...

    ``orders`` are the exponents of the error expansion ``f(s) = L + c1 s^p1 + ...``
    eliminated one per level.  Returns ``(limit, table)`` where ``table`` holds
    the successive columns.
    """
    col = [f(s / 2**k) for k in range(len(orders) + 1)]
    table = [list(col)]
    for p in orders:
        w = 2.0**p
        col = [(w * col[k + 1] - col[k]) / (w - 1) for k in range(len(col) - 1)]
        table.append(list(col))
    return col[0], table


def tail_exponents(n: int, count: int) -> list[int]:
    """First ``count`` decay exponents of quantities that are smooth functions of
    ``u = a r^(1-n)`` and ``w = r0^n r^(-n)`` multiplied by ``r^n``, with the
    linear ``u`` term absent.

    The monomial ``u^j w^k r^n`` decays like ``r^-(j(n-1) + k n - n)``.
    """
    exps = set()
    for j in range(0, 8):
        for k in range(0, 8):
            e = j * (n - 1) + k * n - n
            if e > 0:
                exps.add(e)
    return sorted(exps)[:count]


def fit_power_tail(radii: Sequence, values: Sequence, exponents: Sequence[int]):
    """Fit ``values ~ c0 + sum_k c_k r^-p_k`` and return ``(c0, [c_k])``.

    Exactly determined when ``len(radii) == len(exponents) + 1``; least squares
    otherwise.  Arithmetic is done in mpmath at the current precision so the
    fit is not limited by double-precision cancellation.
    """
    rows = [[mpmath.mpf(1)] + [mpmath.mpf(r) ** (-p) for p in exponents] for r in radii]
    a = mpmath.matrix(rows)
    b = mpmath.matrix([mpmath.mpf(v) for v in values])
    if a.rows == a.cols:
        sol = mpmath.lu_solve(a, b)
    else:
        sol, _ = mpmath.qr_solve(a, b)
    coeffs = [sol[i] for i in range(a.cols)]
    return coeffs[0], coeffs[1:]


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log|y| against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.abs(np.asarray(y, dtype=float)))
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)
