"""Regularisation of the conical point r = r_plus.

V vanishes at r_plus, the largest positive root of

    p(r) = r^n + a r - r0^n          (V = r^(2-n) p(r) / ell^2),

and the metric closes off smoothly there iff phi has period

    beta = 4 pi ell^2 / (r_plus (n - 1 + r0^n / r_plus^n)) = 4 pi / V'(r_plus).

Near the root V is evaluated through the shifted polynomial
q(delta) = p(r_plus + delta) - p(r_plus), expanded binomially, so that small
values of V keep full relative accuracy.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterable

import mpmath

from .errors import ConvergenceError, DomainError, InversionError
from .geometry import SolitonParams, eval_profile
from .numerics.extrapolate import richardson_limit
from .numerics.quadrature import adaptive
from .numerics.roots import bisect, last_sign_change, safe_newton

__all__ = [
    "RegularizedSoliton",
    "ConeChartSample",
    "find_r_plus",
    "chart_edge",
    "period_beta",
    "regularize",
    "v_near_root",
    "vprime_near_root",
    "invert_profile",
    "proper_distance",
    "cone_angle_check",
    "h_function",
    "h_smoothness_probe",
    "h_limit",
    "h_limit_series",
    "u_function",
]


@functools.lru_cache(maxsize=4096)
def find_r_plus(params: SolitonParams) -> float:
    """Largest positive root of V."""
    n, a, r0 = params.n, params.a, params.r0
    if r0 == 0.0 and a >= 0.0:
        raise DomainError("V > 0 for every r > 0: no conical point to regularise")

    def p(r: float) -> float:
        return r**n + a * r - r0**n

    scale = max(r0, abs(a) ** (1.0 / (n - 1)))
    lo = 1e-6 * scale
    while p(lo) > 0.0:
        lo *= 1e-6
    hi = 10.0 * max(r0, abs(a) ** (1.0 / (n - 1)) + 1.0)
    bracket = last_sign_change(p, lo, hi)
    if bracket is None:  # pragma: no cover - excluded by the sign analysis
        raise ConvergenceError("failed to bracket the largest root of V")
    root = bisect(p, *bracket)
    # polish to the correctly rounded double
    with mpmath.workdps(50):
        x = mpmath.mpf(root)
        A, R0 = mpmath.mpf(a), mpmath.mpf(r0) ** n
        for _ in range(6):
            x = x - (x**n + A * x - R0) / (n * x ** (n - 1) + A)
        polished = float(x)
    if abs(polished - root) <= 1e-9 * root:
        root = polished
    return root


def chart_edge(params: SolitonParams) -> float:
    """r_plus, or 0 when V has no positive root (hyperbolic reference)."""
    try:
        return find_r_plus(params)
    except DomainError:
        return 0.0


def period_beta(params: SolitonParams) -> float:
    """Period of phi that removes the conical singularity."""
    rp = find_r_plus(params)
    n = params.n
    beta = 4 * math.pi * params.ell**2 / (rp * (n - 1 + (params.r0 / rp) ** n))
    vprime = eval_profile(params, rp)[1]
    if not (vprime > 0 and abs(beta * vprime / (4 * math.pi) - 1) < 1e-8):
        raise ConvergenceError(f"beta = {beta} inconsistent with 4 pi / V'(r_plus) = {4 * math.pi / vprime}")
    return beta


@dataclass(frozen=True)
class RegularizedSoliton:
    params: SolitonParams
    r_plus: float
    beta: float
    vprime_at_rplus: float

    @property
    def slope_coeff(self) -> float:
        """p'(r_plus) written without cancellation."""
        p, rp = self.params, self.r_plus
        return (p.n - 1) * rp ** (p.n - 1) + p.r0**p.n / rp


def regularize(params: SolitonParams) -> RegularizedSoliton:
    rp = find_r_plus(params)
    beta = period_beta(params)
    return RegularizedSoliton(params=params, r_plus=rp, beta=beta, vprime_at_rplus=4 * math.pi / beta)


@dataclass(frozen=True)
class ConeChartSample:
    rho: float
    circumference_ratio: float
    h_value: float
    u_value: float


def _shift_coeffs(reg: RegularizedSoliton) -> list[float]:
    """c[k] with q(delta)/delta = sum_k c[k] delta^k."""
    n, rp = reg.params.n, reg.r_plus
    c = [reg.slope_coeff]
    for k in range(2, n + 1):
        c.append(math.comb(n, k) * rp ** (n - k))
    return c


def _w(reg: RegularizedSoliton, delta: float) -> float:
    """V(r_plus + delta) / delta."""
    c = _shift_coeffs(reg)
    qd = sum(ck * delta**k for k, ck in enumerate(c))
    n = reg.params.n
    return (reg.r_plus + delta) ** (2 - n) * qd / reg.params.ell**2


def v_near_root(reg: RegularizedSoliton, delta: float) -> float:
    return delta * _w(reg, delta)


def vprime_near_root(reg: RegularizedSoliton, delta: float) -> float:
    c = _shift_coeffs(reg)
    n = reg.params.n
    q = delta * sum(ck * delta**k for k, ck in enumerate(c))
    dq = sum((k + 1) * ck * delta**k for k, ck in enumerate(c))
    r = reg.r_plus + delta
    return ((2 - n) * r ** (1 - n) * q + r ** (2 - n) * dq) / reg.params.ell**2


def invert_profile(reg: RegularizedSoliton, s: float) -> float:
    """delta > 0 with V(r_plus + delta) = s, inside the monotone neighbourhood."""
    if not s > 0:
        raise DomainError(f"need s > 0, got {s}")
    hi = 2.0 * s / reg.vprime_at_rplus
    limit = 1e3 * max(reg.r_plus, 1.0)
    while True:
        # test the bracket before evaluating V there, which may overflow far out
        if hi > limit or vprime_near_root(reg, hi) <= 0.0:
            raise InversionError(f"V is not monotone up to the level s = {s}")
        if v_near_root(reg, hi) >= s:
            break
        hi *= 2.0
    return safe_newton(
        lambda d: v_near_root(reg, d) - s,
        lambda d: vprime_near_root(reg, d),
        0.0,
        hi,
        x0=s / reg.vprime_at_rplus,
    )


def proper_distance(reg: RegularizedSoliton, delta: float) -> float:
    """Length of the radial geodesic from r_plus to r_plus + delta.

    With r = r_plus + t^2 the integrand 1/sqrt(V) dr becomes 2/sqrt(V/delta) dt,
    which is smooth at t = 0.
    """
    return adaptive(lambda t: 2.0 / math.sqrt(_w(reg, t * t)), 0.0, math.sqrt(delta))


def u_function(reg: RegularizedSoliton, s: float) -> float:
    """u(s) = (beta / 2 pi) V'(V^{-1}(s)) / 2, equal to 1 at s = 0."""
    delta = invert_profile(reg, s) if s > 0 else 0.0
    return reg.beta / (2 * math.pi) * vprime_near_root(reg, delta) / 2


def h_function(reg: RegularizedSoliton, s: float) -> float:
    """h(s) = (V'(r_plus)^2 / V'(V^{-1}(s))^2 - 1) / s."""
    delta = invert_profile(reg, s)
    ratio = reg.vprime_at_rplus / vprime_near_root(reg, delta)
    return (ratio * ratio - 1.0) / s


def h_smoothness_probe(reg: RegularizedSoliton, s_list: Iterable[float]) -> list[float]:
    return [h_function(reg, float(s)) for s in s_list]


def h_limit(reg: RegularizedSoliton, s: float | None = None) -> float:
    """h(0+) by Richardson extrapolation on s, s/2, s/4."""
    if s is None:
        s = 1e-3 * reg.vprime_at_rplus * reg.r_plus
    value, _ = richardson_limit(lambda x: h_function(reg, x), s, orders=(1, 2))
    return float(value)


def h_limit_series(reg: RegularizedSoliton) -> float:
    """-2 V''(r_plus) / V'(r_plus)^2 from the first-order Taylor coefficient."""
    n, rp = reg.params.n, reg.r_plus
    c = _shift_coeffs(reg)
    # V = r^(2-n) q / ell^2 with q(0) = 0, q'(0) = c[0], q''(0) = 2 c[1]
    v2 = (2 * (2 - n) * rp ** (1 - n) * c[0] + rp ** (2 - n) * 2 * c[1]) / reg.params.ell**2
    return -2 * v2 / reg.vprime_at_rplus**2


def cone_angle_check(
    reg: RegularizedSoliton,
    rho_list: Iterable[float],
    period: float | None = None,
) -> list[ConeChartSample]:
    """Circumference over 2*pi*(proper radius) for circles r = V^{-1}(rho^2).

    The ratio tends to ``period / beta`` as rho -> 0, so it tends to 1 exactly
    when phi has the regularising period.
    """
    period = reg.beta if period is None else period
    out = []
    for rho in rho_list:
        rho = float(rho)
        if not rho > 0:
            raise DomainError(f"rho must be positive, got {rho}")
        s = rho * rho
        delta = invert_profile(reg, s)
        radius = proper_distance(reg, delta)
        circumference = period * math.sqrt(v_near_root(reg, delta))
        out.append(
            ConeChartSample(
                rho=rho,
                circumference_ratio=circumference / (2 * math.pi * radius),
                h_value=h_function(reg, s),
                u_value=u_function(reg, s),
            )
        )
    return out
