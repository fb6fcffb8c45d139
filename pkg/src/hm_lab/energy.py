"""Hawking-Horowitz mass, Hamiltonian energy and the comparison with g_HM.

Both energies are limits r -> infinity of integrals over the torus T_r of
constant r.  The integrands are smooth functions of u = a r^(1-n) and
w = r0^n r^(-n) times r^n, so the finite-radius values approach their limit
along the exponents returned by ``tail_exponents``; the limit is taken by a
linear fit in those powers.  Evaluations run in mpmath because H - H0 decays
like r^-n and is lost to rounding in double precision long before the fit
radii are reached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import ConvergenceError, DomainError
from .geometry import SolitonParams, closed_form_dps, metric_components, profile_terms
from .numerics.differentiate import gradient
from .numerics.extrapolate import fit_power_tail, loglog_slope, tail_exponents
from .numerics.quadrature import torus_integral
from .numerics.tensors import as_working, christoffel, inverse, workprec
from .soliton import chart_edge, find_r_plus, period_beta

__all__ = [
    "TOL_EXTRAP",
    "RADII_FACTORS",
    "EnergyReport",
    "ComparisonReport",
    "LimitResult",
    "FalloffAudit",
    "asymptotic_scale",
    "tail_scale",
    "mean_curvature",
    "mean_curvature_numeric",
    "mean_curvature_reference",
    "mass_integrand",
    "mass_closed_form",
    "mass_closed_form_beta",
    "hawking_horowitz_mass",
    "hamiltonian_density",
    "hamiltonian_density_numeric",
    "hamiltonian_integrand",
    "hamiltonian_closed_form",
    "hamiltonian_energy",
    "density_tail",
    "corrected_tail_exponent",
    "density_tail_coefficient",
    "falloff_audit",
    "energy_report",
    "hm_companion",
    "compare_with_hm",
    "scalar_inequality_gap",
]

TOL_EXTRAP = 1e-8
RADII_FACTORS = (1e2, 10**2.5, 1e3, 10**3.5, 1e4)


def asymptotic_scale(params: SolitonParams) -> float:
    """Radius beyond which u and w are small: max(r_plus, r0, |a|^(1/(n-1)))."""
    return max(chart_edge(params), params.r0, abs(params.a) ** (1.0 / (params.n - 1)))


def tail_scale(params: SolitonParams) -> float:
    """Radius beyond which the leading term of a remainder series dominates.

    Besides the scale of u and w this includes r0^n/|a|, where the a^2 and
    a r0^n terms of the density and frame remainders cross over.
    """
    L = asymptotic_scale(params)
    if params.a != 0:
        L = max(L, params.r0**params.n / abs(params.a))
    return L


def _dps_for(params: SolitonParams, r: float) -> int:
    ratio = max(r / asymptotic_scale(params), 10.0)
    return 30 + int(math.ceil(2 * params.n * math.log10(ratio)))


def _check_radius(params: SolitonParams, r: float):
    if not r > chart_edge(params):
        raise DomainError(f"r = {r} is not outside r_plus = {chart_edge(params)}")


# mean curvature -------------------------------------------------------------


def _mean_curvature_mp(params: SolitonParams, r):
    v, v1, _ = profile_terms(params, r)
    return (v1 / 2 + (params.n - 2) * v / r) / mpmath.sqrt(v)


def mean_curvature(params: SolitonParams, r: float) -> float:
    """H = V^(-1/2) (V'/2 + (n-2) V / r) of T_r with respect to V^(1/2) d_r."""
    _check_radius(params, r)
    with workprec(closed_form_dps(params, r)):
        return float(_mean_curvature_mp(params, mpmath.mpf(r)))


def mean_curvature_reference(params: SolitonParams) -> float:
    """H0 = (n-1)/ell, the mean curvature of T_r in the hyperbolic reference."""
    return (params.n - 1) / params.ell


def mean_curvature_numeric(params: SolitonParams, r: float) -> float:
    """H as the divergence of the unit normal built from finite-difference Christoffels.

    For nu = V^(1/2) d_r, div nu restricted to T_r is V^(1/2) sum_{a != r} Gamma^a_{a r}.
    """
    _check_radius(params, r)
    h = 4e-3 * min(r - chart_edge(params), r)
    x = np.array([r, 0.0] + [0.0] * (params.n - 2))
    g = metric_components(params, x)
    dg = gradient(lambda y: metric_components(params, y), x, h)
    gamma = christoffel(np.linalg.inv(g), dg)
    return float(math.sqrt(g[1, 1]) * sum(gamma[a, a, 0] for a in range(1, params.n)))


def mean_curvature_expansion(params: SolitonParams, r: float) -> float:
    n = params.n
    return (n - 1) / params.ell + params.r0**n / (2 * params.ell * r**n)


# limits ---------------------------------------------------------------------


@dataclass(frozen=True)
class LimitResult:
    value: float
    table: tuple[tuple[float, float], ...]
    exponents: tuple[int, ...]
    spread: float  # |full fit - fit without the innermost radius|


def _limit(params: SolitonParams, integrand: Callable, factors: Sequence[float], tol: float) -> LimitResult:
    scale = asymptotic_scale(params)
    radii = [f * scale for f in factors]
    if len(radii) < 3:
        raise DomainError("need at least three radii to extrapolate")
    with workprec(_dps_for(params, max(radii))):
        values = [integrand(mpmath.mpf(r)) for r in radii]
        exps = tail_exponents(params.n, len(radii) - 1)
        c0, _ = fit_power_tail(radii, values, exps)
        c0_sub, _ = fit_power_tail(radii[1:], values[1:], exps[:-1])
        spread = abs(c0 - c0_sub)
        value = float(c0)
        table = tuple((float(r), float(v)) for r, v in zip(radii, values))
    if not math.isfinite(value) or spread > max(1.0, abs(value)) * max(tol, 1e-6):
        raise ConvergenceError(
            f"extrapolation not converged: value {value:.12g}, spread {float(spread):.3e}"
        )
    return LimitResult(value=value, table=table, exponents=tuple(exps), spread=float(spread))


# Hawking-Horowitz mass ------------------------------------------------------


def _periods(params: SolitonParams, beta):
    return (beta,) + tuple(mpmath.mpf(x) if isinstance(beta, mpmath.mpf) else x for x in params.lambdas)


def mass_integrand(params: SolitonParams, r, beta: float | None = None):
    """-(1/8 pi G) integral over T_r of N (H - H0), with N = r.

    Float in, float out; an mpf radius is evaluated in the current precision.
    """
    beta = period_beta(params) if beta is None else beta
    as_float = not isinstance(r, mpmath.mpf)
    if as_float:
        _check_radius(params, r)
        with workprec(_dps_for(params, r)):
            return float(mass_integrand(params, mpmath.mpf(r), beta))
    n = params.n
    ell = mpmath.mpf(params.ell)
    v, _, _ = profile_terms(params, r)
    dH = _mean_curvature_mp(params, r) - (n - 1) / ell
    density = r * dH * mpmath.sqrt(v) * r ** (n - 2)
    total = torus_integral(lambda *angles: density, _periods(params, mpmath.mpf(beta)))
    return -total / (8 * mpmath.pi * mpmath.mpf(params.G))


def mass_closed_form_beta(params: SolitonParams) -> float:
    """-lambda beta r0^n / (16 pi G ell^2)."""
    beta = period_beta(params)
    return -params.lam * beta * params.r0**params.n / (16 * math.pi * params.G * params.ell**2)


def mass_closed_form(params: SolitonParams) -> float:
    """-lambda r0^n / (4 G r_plus (n - 1 + r0^n / r_plus^n))."""
    rp = find_r_plus(params)
    n = params.n
    return -params.lam * params.r0**n / (4 * params.G * rp * (n - 1 + (params.r0 / rp) ** n))


def hawking_horowitz_mass(
    params: SolitonParams,
    factors: Sequence[float] = RADII_FACTORS,
    tol: float = TOL_EXTRAP,
) -> LimitResult:
    beta = period_beta(params)
    return _limit(params, lambda r: mass_integrand(params, r, beta), factors, tol)


# Hamiltonian energy ---------------------------------------------------------


def hamiltonian_density(params: SolitonParams, r):
    """The density E(r) of the Hamiltonian energy, in closed form.

    With X = g(e1, e1) = r^2 / (ell^2 V) and Y = g(e2, e2) = 1/X:

        div  = (n+1) X / ell - r X V'/(ell V) - Y / ell - (n-2)/ell
        dtr  = (r/ell) d/dr (X + Y + n - 2)
        tail = (3 X - X^2 - 2) / ell
        E    = div - dtr - tail
    """
    if not isinstance(r, mpmath.mpf):
        _check_radius(params, r)
        with workprec(_dps_for(params, r)):
            return float(hamiltonian_density(params, mpmath.mpf(r)))
    n = params.n
    ell = mpmath.mpf(params.ell)
    v, v1, _ = profile_terms(params, r)
    x = r * r / (ell * ell * v)
    y = 1 / x
    dx = 2 * r / (ell * ell * v) - r * r * v1 / (ell * ell * v * v)
    dy = ell * ell * v1 / (r * r) - 2 * ell * ell * v / r**3
    div = (n + 1) * x / ell - r**3 * v1 / (ell**3 * v * v) - y / ell - (n - 2) / ell
    dtr = r / ell * (dx + dy)
    tail = (3 * x - x * x - 2) / ell
    return div - dtr - tail


def _frame(params: SolitonParams, x):
    """Rows are the coordinate components of the reference orthonormal frame."""
    n = params.n
    r = x[0]
    ell = mpmath.mpf(params.ell) if isinstance(r, mpmath.mpf) else params.ell
    e = np.zeros((n, n), dtype=object if isinstance(r, mpmath.mpf) else float)
    e[0, 0] = r / ell
    e[1, 1] = ell / r
    for i in range(2, n):
        e[i, i] = 1 / r
    return e


def _reference_metric(params: SolitonParams, x):
    n = params.n
    r = x[0]
    ell = mpmath.mpf(params.ell) if isinstance(r, mpmath.mpf) else params.ell
    g = np.zeros((n, n), dtype=object if isinstance(r, mpmath.mpf) else float)
    g[0, 0] = ell * ell / (r * r)
    g[1, 1] = r * r / (ell * ell)
    for i in range(2, n):
        g[i, i] = r * r
    return g


def hamiltonian_density_numeric(params: SolitonParams, r: float, dps: int | None = None) -> float:
    """E(r) from its definition with the reference connection and all derivatives by finite differences."""
    _check_radius(params, r)
    n = params.n
    dps = closed_form_dps(params, r) + 10 if dps is None else dps
    h = 1e-6 * min(r - chart_edge(params), r)
    with workprec(dps):
        x = as_working(np.array([r, 0.0] + [0.0] * (n - 2)), dps)
        hw = mpmath.mpf(h)
        gref = _reference_metric(params, x)
        gref_inv = inverse(gref)
        gamma = christoffel(gref_inv, gradient(lambda y: _reference_metric(params, y), x, hw))
        g = metric_components(params, x)
        dg = gradient(lambda y: metric_components(params, y), x, hw)
        # (nabla_k g)_ab = d_k g_ab - Gamma^m_ka g_mb - Gamma^m_kb g_am
        cov = dg - np.einsum("mka,mb->kab", gamma, g) - np.einsum("mkb,am->kab", gamma, g)
        e = _frame(params, x)
        div = np.einsum("ik,a,ib,kab->", e, e[0], e, cov)

        def trace(y):
            return np.einsum("ab,ab->", inverse(_reference_metric(params, y)), metric_components(params, y))

        dtrace = gradient(lambda y: np.array([trace(y)]), x, hw)[:, 0]
        d1_trace = np.dot(e[0], dtrace)
        gf = np.einsum("ia,ab,jb->ij", e, g, e)
        af = gf - np.eye(n, dtype=int)
        tail = (af[0, 0] - gf[0, 0] * np.trace(af)) / mpmath.mpf(params.ell)
        return float(div - d1_trace - tail)


def hamiltonian_integrand(params: SolitonParams, r, beta: float | None = None):
    """(1 / (4 Vol)) integral over T_r of E N e^2 ^ ... ^ e^n, Vol = 2 pi ell lambda."""
    beta = period_beta(params) if beta is None else beta
    if not isinstance(r, mpmath.mpf):
        _check_radius(params, r)
        with workprec(_dps_for(params, r)):
            return float(hamiltonian_integrand(params, mpmath.mpf(r), beta))
    n = params.n
    ell = mpmath.mpf(params.ell)
    density = hamiltonian_density(params, r) * r * (r / ell) * r ** (n - 2)
    total = torus_integral(lambda *angles: density, _periods(params, mpmath.mpf(beta)))
    vol = 2 * mpmath.pi * ell * mpmath.mpf(params.lam)
    return total / (4 * vol)


def hamiltonian_closed_form(params: SolitonParams) -> float:
    """-beta r0^n / (8 pi ell^3)."""
    return -period_beta(params) * params.r0**params.n / (8 * math.pi * params.ell**3)


def hamiltonian_energy(
    params: SolitonParams,
    factors: Sequence[float] = RADII_FACTORS,
    tol: float = TOL_EXTRAP,
) -> LimitResult:
    beta = period_beta(params)
    return _limit(params, lambda r: hamiltonian_integrand(params, r, beta), factors, tol)


def density_tail(params: SolitonParams, factors: Sequence[float] | None = None, scale: float | None = None):
    """Remainder E(r) r^n + r0^n/ell over r in [1e2, 1e4] * scale and its decay exponent.

    ``scale`` defaults to r_plus.
    Returns ``(radii, remainders, exponent)`` where the exponent is minus the
    log-log slope of |remainder| against r.
    """
    factors = np.geomspace(1e2, 1e4, 9) if factors is None else factors
    if scale is None:
        scale = chart_edge(params) or params.ell
    radii = [float(f) * scale for f in factors]
    n = params.n
    rem = []
    with workprec(_dps_for(params, max(radii))):
        for r in radii:
            rm = mpmath.mpf(r)
            rem.append(float(hamiltonian_density(params, rm) * rm**n + mpmath.mpf(params.r0) ** n / params.ell))
    return radii, rem, -loglog_slope(radii, rem)


def corrected_tail_exponent(radii: Sequence[float], remainders: Sequence[float], corrections: int = 2) -> float:
    """Decay exponent p from log|R| = log c - p log r + sum_k d_k r^-k.

    The remainder is a series in 1/r times r^-p, so the plain log-log slope is
    biased by the first correction over a finite range; the extra columns absorb it.
    """
    x = np.asarray(radii, dtype=float)
    x = x / x[0]
    cols = [np.ones_like(x), -np.log(x)] + [x ** (-k) for k in range(1, corrections + 1)]
    coef, *_ = np.linalg.lstsq(np.stack(cols, axis=1), np.log(np.abs(remainders)), rcond=None)
    return float(coef[1])


def density_tail_coefficient(params: SolitonParams) -> float:
    """Leading coefficient of R = E r^n + r0^n/ell: (n-1) a^2/ell at order r^-(n-2)
    when a != 0, and (n-1) r0^(2n)/ell at order r^-n when a = 0."""
    n = params.n
    if params.a != 0:
        return (n - 1) * params.a**2 / params.ell
    return (n - 1) * params.r0 ** (2 * n) / params.ell


# fall-off -------------------------------------------------------------------


@dataclass(frozen=True)
class FalloffAudit:
    radii: tuple[float, ...]
    a11: tuple[float, ...]
    a22: tuple[float, ...]
    a22_leading_dev: float  # max |a22 - lead| / |lead|
    a11_second_order: float  # (a11 + lead) / lead^2 at the largest radius, -> 1
    decay_exponent: float
    satisfies_rn_falloff: bool


def falloff_audit(params: SolitonParams, factors: Sequence[float] = RADII_FACTORS) -> FalloffAudit:
    """Frame deviations a_ij = g(e_i, e_j) - delta_ij against their leading terms.

    With lead = a r^(1-n) - r0^n r^-n one has a22 = lead exactly and
    a11 = -lead + lead^2 - ..., so a != 0 decays only like r^-(n-1).
    """
    n = params.n
    scale = tail_scale(params)
    radii = [f * scale for f in factors]
    a11, a22, dev22, second = [], [], 0.0, math.nan
    with workprec(_dps_for(params, max(radii))):
        a, r0n, ell = mpmath.mpf(params.a), mpmath.mpf(params.r0) ** n, mpmath.mpf(params.ell)
        for r in radii:
            rm = mpmath.mpf(r)
            v, _, _ = profile_terms(params, rm)
            x = rm * rm / (ell * ell * v)
            lead = a * rm ** (1 - n) - r0n * rm ** (-n)
            a11.append(float(x - 1))
            a22.append(float(1 / x - 1))
            if lead != 0:
                dev22 = max(dev22, float(abs(1 / x - 1 - lead) / abs(lead)))
                second = float((x - 1 + lead) / lead**2)
    exponent = -loglog_slope(radii, a11) if all(v != 0 for v in a11) else math.inf
    return FalloffAudit(
        radii=tuple(radii),
        a11=tuple(a11),
        a22=tuple(a22),
        a22_leading_dev=dev22,
        a11_second_order=second,
        decay_exponent=exponent,
        satisfies_rn_falloff=bool(exponent > n - 0.5),
    )


# report ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EnergyReport:
    params: SolitonParams
    H_at: Callable[[float], float] = field(repr=False)
    H0: float
    ehh_finite: Callable[[float], float] = field(repr=False)
    E_HH: float
    E_ham: float
    ratio_check: float
    lambda_vol: float
    E_HH_closed: float
    E_HH_closed_beta: float
    E_ham_closed: float
    mass_limit: LimitResult
    hamiltonian_limit: LimitResult


def energy_report(
    params: SolitonParams,
    factors: Sequence[float] = RADII_FACTORS,
    tol: float = TOL_EXTRAP,
) -> EnergyReport:
    mass = hawking_horowitz_mass(params, factors, tol)
    ham = hamiltonian_energy(params, factors, tol)
    scale = params.lam * params.ell / (2 * params.G)
    return EnergyReport(
        params=params,
        H_at=lambda r: mean_curvature(params, r),
        H0=mean_curvature_reference(params),
        ehh_finite=lambda r: mass_integrand(params, r),
        E_HH=mass.value,
        E_ham=ham.value,
        ratio_check=mass.value - scale * ham.value,
        lambda_vol=params.lam,
        E_HH_closed=mass_closed_form(params),
        E_HH_closed_beta=mass_closed_form_beta(params),
        E_ham_closed=hamiltonian_closed_form(params),
        mass_limit=mass,
        hamiltonian_limit=ham,
    )


# comparison with the Horowitz-Myers companion -------------------------------


@dataclass(frozen=True)
class ComparisonReport:
    rbar0: float
    E_HH_g: float
    E_HH_hm: float
    ratio: float
    s: float

    @property
    def inequality_holds(self) -> bool:
        return self.E_HH_g >= self.E_HH_hm


def hm_companion(params: SolitonParams) -> SolitonParams:
    """The a = 0 metric whose phi-period equals beta of ``params``."""
    rp = find_r_plus(params)
    n = params.n
    rbar0 = rp / n * (n - 1 + (params.r0 / rp) ** n)
    return params.replace(a=0.0, r0=rbar0)


def scalar_inequality_gap(n: int, s):
    """n - 1 + s^n - n s, nonnegative for s >= 0 and zero only at s = 1."""
    return n - 1 + s**n - n * s


def compare_with_hm(params: SolitonParams) -> ComparisonReport:
    n = params.n
    rp = find_r_plus(params)
    rbar0 = hm_companion(params).r0
    s = params.r0 / rp
    e_hm = -params.lam * rbar0 ** (n - 1) / (4 * params.G * n)
    return ComparisonReport(
        rbar0=rbar0,
        E_HH_g=mass_closed_form(params),
        E_HH_hm=e_hm,
        ratio=(n * s / (n - 1 + s**n)) ** n,
        s=s,
    )
