"""Static extensions -N^2 dt^2 + g and the vacuum equations with Lambda < 0.

For a radial lapse N(r) the spacetime Ricci tensor is diagonal with

    Ric(d_t, d_t)         = N N'' V + N N' (V' + (n-2) V / r)
    Ric(d_r, d_r)         = -N''/N - N' V'/(2 N V) - (V'' + (n-2) V'/r) / (2 V)
    Ric(d_phi, d_phi)     = -N' V V'/(2 N) - V (V'' + (n-2) V'/r) / 2
    Ric(d_th_i, d_th_i)   = -r V' - (n-3) V - N' r V / N

and the vacuum equations read Ric = (2 Lambda / (n-1)) g~.  Only a = 0 with
N = c r and Lambda = -n(n-1)/(2 ell^2) solves them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import DomainError, OutOfChartError
from .geometry import SolitonParams, closed_form_dps, profile_terms
from .numerics.tensors import metric_curvature, workprec
from .soliton import chart_edge

__all__ = [
    "LapseAnsatz",
    "ResidualReport",
    "StaticVerdict",
    "ads_lambda",
    "component_names",
    "default_grid",
    "spacetime_ricci",
    "spacetime_ricci_numeric",
    "vacuum_residual",
    "solve_static_conditions",
]


@dataclass(frozen=True)
class LapseAnsatz:
    """N(r) = c r + d, or any radial lapse given as r -> (N, N', N'')."""

    c: float = 1.0
    d: float = 0.0
    func: Callable | None = None

    @classmethod
    def general(cls, func: Callable) -> "LapseAnsatz":
        return cls(c=math.nan, d=math.nan, func=func)

    def __call__(self, r):
        if self.func is not None:
            return self.func(r)
        return self.c * r + self.d, self.c + 0 * r, 0 * r

    def scaled(self, kappa: float) -> "LapseAnsatz":
        if self.func is None:
            return LapseAnsatz(c=kappa * self.c, d=kappa * self.d)
        f = self.func
        return LapseAnsatz.general(lambda r: tuple(kappa * x for x in f(r)))


@dataclass(frozen=True)
class ResidualReport:
    lambda_used: float
    components: tuple[str, ...]
    residuals: tuple[float, ...]
    max_abs: float
    r_grid: np.ndarray
    table: np.ndarray  # (len(r_grid), len(components))


@dataclass(frozen=True)
class StaticVerdict:
    is_ads_soliton: bool
    fitted_c: float
    fitted_d: float
    fit_residual: float
    max_residual: float


def ads_lambda(params: SolitonParams) -> float:
    return -params.n * (params.n - 1) / (2 * params.ell**2)


def component_names(n: int) -> tuple[str, ...]:
    return ("t", "r", "phi") + tuple(f"theta{i}" for i in range(1, n - 1))


def default_grid(params: SolitonParams, count: int = 64, lo: float = 1.01, hi: float = 100.0) -> np.ndarray:
    edge = chart_edge(params) or params.ell
    return np.geomspace(lo * edge, hi * edge, count)


def _ricci_mp(params: SolitonParams, lapse: LapseAnsatz, r: float):
    if not r > chart_edge(params):
        raise OutOfChartError(f"r = {r} is not in the chart")
    n = params.n
    rr = mpmath.mpf(r)
    v, v1, v2 = profile_terms(params, rr)
    N, N1, N2 = (mpmath.mpf(x) for x in lapse(rr))
    if not N > 0:
        raise DomainError(f"lapse must be positive, got N({r}) = {float(N)}")
    radial = v2 + (n - 2) * v1 / rr
    tt = N * N2 * v + N * N1 * (v1 + (n - 2) * v / rr)
    rr_ = -N2 / N - N1 * v1 / (2 * N * v) - radial / (2 * v)
    pp = -N1 * v * v1 / (2 * N) - v * radial / 2
    th = -rr * v1 - (n - 3) * v - N1 * rr * v / N
    metric = (-N * N, 1 / v, v, rr * rr)
    return (tt, rr_, pp, th), metric


def spacetime_ricci(params: SolitonParams, lapse: LapseAnsatz, r: float) -> tuple[float, float, float, float]:
    """Coordinate components (tt, rr, phiphi, theta theta) of the spacetime Ricci tensor."""
    with workprec(closed_form_dps(params, r)):
        comps, _ = _ricci_mp(params, lapse, r)
        return tuple(float(x) for x in comps)


def spacetime_ricci_numeric(params: SolitonParams, lapse: LapseAnsatz, r: float, h: float | None = None) -> np.ndarray:
    """Diagonal spacetime Ricci from finite differences of the full (n+1)-metric."""
    n = params.n
    edge = chart_edge(params)
    if h is None:
        h = 4e-3 * min(r - edge, r)

    def metric(x):
        rad = x[1]
        v, _, _ = profile_terms(params, rad)
        N = lapse(rad)[0]
        g = np.zeros((n + 1, n + 1), dtype=object if isinstance(rad, mpmath.mpf) else float)
        g[0, 0] = -N * N
        g[1, 1] = 1 / v
        g[2, 2] = v
        for i in range(3, n + 1):
            g[i, i] = rad * rad
        return g

    x = np.array([0.0, r, 0.0] + [0.0] * (n - 2))
    mc = metric_curvature(metric, x, h)
    return np.diag(mc.ricci)


def vacuum_residual(
    params: SolitonParams,
    lapse: LapseAnsatz,
    lam: float,
    r_grid: Sequence[float],
) -> ResidualReport:
    """Orthonormal-frame components of Ric - (2 Lambda / (n-1)) g~ over a radial grid.

    Each coordinate component is divided by |g~_ii|, which makes the residual
    dimensionless and invariant under N -> kappa N.
    """
    n = params.n
    names = component_names(n)
    grid = np.asarray(r_grid, dtype=float)
    table = np.zeros((grid.size, len(names)))
    for k, r in enumerate(grid):
        with workprec(closed_form_dps(params, float(r))):
            kappa = 2 * mpmath.mpf(lam) / (n - 1)
            (tt, rr_, pp, th), (gt, gr, gp, gth) = _ricci_mp(params, lapse, float(r))
            row = [
                (tt - kappa * gt) / abs(gt),
                (rr_ - kappa * gr) / abs(gr),
                (pp - kappa * gp) / abs(gp),
            ] + [(th - kappa * gth) / abs(gth)] * (n - 2)
            table[k] = [float(x) for x in row]
    per = np.max(np.abs(table), axis=0)
    return ResidualReport(
        lambda_used=float(lam),
        components=names,
        residuals=tuple(float(x) for x in per),
        max_abs=float(per.max()),
        r_grid=grid,
        table=table,
    )


def solve_static_conditions(
    params: SolitonParams,
    lam: float,
    r_grid: Sequence[float] | None = None,
    tol: float = 1e-8,
) -> StaticVerdict:
    """Least-squares fit of N = c r + d to the tt equation, then a full residual check.

    With N'' = 0 the tt equation is linear and homogeneous in (c, d):

        c (W(r) + k r) + d k = 0,   W = V' + (n-2) V / r,   k = 2 Lambda / (n-1).

    The fitted direction is the right singular vector of the smallest singular
    value; the relative singular value is the normalised fit residual.
    """
    if not lam < 0:
        raise DomainError("Lambda must be negative")
    n = params.n
    grid = default_grid(params) if r_grid is None else np.asarray(r_grid, dtype=float)
    scale = chart_edge(params) or params.ell
    k = 2 * lam / (n - 1)
    rows = []
    for r in grid:
        with workprec(closed_form_dps(params, float(r))):
            v, v1, _ = profile_terms(params, mpmath.mpf(r))
            w = v1 + (n - 2) * v / r
            norm = abs(k) * r
            rows.append([float((w + k * r) / norm), float(k * scale / norm)])
    a = np.array(rows)
    _, sv, vt = np.linalg.svd(a, full_matrices=False)
    fit_residual = float(sv[-1] / sv[0])
    c, d_scaled = vt[-1]
    if c < 0:
        c, d_scaled = -c, -d_scaled
    d = d_scaled * scale
    lapse = LapseAnsatz(c=c, d=d)
    positive = c > 0 and all(c * r + d > 0 for r in grid)
    max_res = vacuum_residual(params, lapse, lam, grid).max_abs if positive else math.inf
    ok = bool(
        positive
        and fit_residual < tol
        and abs(d) <= tol * c * scale
        and max_res < tol * abs(k)
    )
    return StaticVerdict(
        is_ads_soliton=ok,
        fitted_c=float(c),
        fitted_d=float(d),
        fit_residual=fit_residual,
        max_residual=float(max_res),
    )
