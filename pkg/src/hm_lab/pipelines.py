"""One pipeline per CLI subcommand: evaluate a family member and check the
invariants of the corresponding module.

Each pipeline returns a ``PipelineResult`` holding named results, the list of
checks and the series that the plotting layer draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import complex_structure as cx
from . import energy as en
from . import soliton as sol
from . import static as st
from .errors import UnsupportedDimensionError
from .geometry import (
    TOL_CLOSED,
    TOL_FD,
    ChartPoint,
    SolitonParams,
    cancellation_factor,
    closed_form_dps,
    fd_precision,
    metric_components,
    curvature_numeric,
    profile_terms,
    ricci_closed,
)
from .numerics.differentiate import jet
from .numerics.extrapolate import fit_power_tail, tail_exponents
from .numerics.tensors import as_working, workprec
from .reports import Check, check_close, check_lower, check_upper

__all__ = ["Tolerances", "PipelineResult", "COMMANDS", "run_pipeline", "probe_radius"]


@dataclass(frozen=True)
class Tolerances:
    tol_fd: float = TOL_FD
    tol_extrap: float = en.TOL_EXTRAP
    root_tol: float = 1e-12


@dataclass
class PipelineResult:
    results: dict
    checks: list[Check]
    series: dict = field(default_factory=dict)


def probe_radius(params: SolitonParams, r: float | None) -> float:
    edge = sol.chart_edge(params)
    if r is not None:
        return float(r)
    return 2.0 * edge if edge > 0 else 2.0 * params.ell


def _sample_grid(params: SolitonParams, count: int) -> np.ndarray:
    edge = sol.chart_edge(params)
    if edge > 0:
        return np.geomspace(1.05 * edge, 10 * edge, count)
    return np.geomspace(0.1 * params.ell, 10 * params.ell, count)


def _worst(errors, values, refs):
    k = int(np.argmax(np.abs(errors)))
    return k, values[k], refs[k], errors[k]


# curvature ------------------------------------------------------------------


def _profile_fd(params: SolitonParams, r: float):
    """Finite-difference V', V'' relative to the size of their individual terms."""
    edge = sol.chart_edge(params)
    d = min(r - edge, r)
    dps = fd_precision(params, r)
    h = 4e-3 * d if dps is None else 1e-6 * d
    with workprec(dps):
        x = as_working(np.array([r]), dps)
        hw = h if dps is None else mpmath.mpf(h)
        _, dv, ddv = jet(lambda y: profile_terms(params, y[0])[0], x, hw)
        fd1, fd2 = float(dv[0]), float(ddv[0, 0])
    n, ell2 = params.n, params.ell**2
    c = params.r0**n
    v1, v2 = (float(t) for t in profile_terms(params, mpmath.mpf(r))[1:]) if dps else profile_terms(params, r)[1:]
    s1 = (2 * r + abs((3 - n) * params.a) * r ** (2 - n) + (n - 2) * c * r ** (1 - n)) / ell2
    s2 = (2 + abs((3 - n) * (2 - n) * params.a) * r ** (1 - n) + (n - 2) * (n - 1) * c * r ** (-n)) / ell2
    return (fd1 - v1) / s1, (fd2 - v2) / s2


def curvature(params: SolitonParams, tol: Tolerances, r: float | None = None) -> PipelineResult:
    S = params.S
    r_probe = probe_radius(params, r)
    probe = ricci_closed(params, ChartPoint.at(params, r_probe))
    probe_num = curvature_numeric(params, ChartPoint.at(params, r_probe))
    grid = _sample_grid(params, 100)
    sc, sn, gam, off, theta, p1, p2 = [], [], [], [], [], [], []
    for rr in grid:
        pt = ChartPoint.at(params, float(rr))
        cl = ricci_closed(params, pt)
        nu = curvature_numeric(params, pt)
        sc.append(cl.scalar)
        sn.append(nu.scalar)
        gam.append(np.max(np.abs(nu.gamma - cl.gamma) / np.maximum(1.0, np.abs(cl.gamma))))
        ric = nu.ricci
        offd = ric - np.diag(np.diag(ric))
        off.append(np.max(np.abs(offd)) / max(1.0, np.max(np.abs(np.diag(ric)))))
        th = cl.ricci_diag[2:]
        theta.append(max(th) - min(th))
        e1, e2 = _profile_fd(params, float(rr))
        p1.append(e1)
        p2.append(e2)
    sc, sn = np.array(sc), np.array(sn)
    checks = []
    k = int(np.argmax(np.abs(sc - S)))
    checks.append(check_close("scalar_closed", sc[k], S, TOL_CLOSED))
    k = int(np.argmax(np.abs(sn - S)))
    checks.append(check_close("scalar_numeric", sn[k], S, tol.tol_fd))
    checks.append(check_close("christoffel_numeric_vs_closed", max(gam), 0.0, tol.tol_fd))
    checks.append(check_close("ricci_offdiagonal_numeric", max(off), 0.0, tol.tol_fd))
    checks.append(check_close("ricci_theta_components_equal", max(theta), 0.0, 0.0))
    worst_p = max(max(abs(x) for x in p1), max(abs(x) for x in p2))
    checks.append(check_close("profile_derivatives_fd", worst_p, 0.0, tol.tol_fd))
    v, v1, v2 = (float(t) for t in profile_terms(params, mpmath.mpf(r_probe)))
    results = {
        "r_plus": sol.chart_edge(params),
        "S": S,
        "Lambda": params.Lambda,
        "r": r_probe,
        "V": v,
        "V_prime": v1,
        "V_second": v2,
        "scalar_closed": probe.scalar,
        "scalar_numeric": probe_num.scalar,
        "ricci_rr": probe.ricci_diag[0],
        "ricci_phiphi": probe.ricci_diag[1],
        "ricci_thetatheta": probe.ricci_diag[2],
        "grid_points": len(grid),
    }
    series = {"r": grid, "closed_error": np.abs(sc - S), "numeric_error": np.abs(sn - S)}
    return PipelineResult(results, checks, series)


# regularity -----------------------------------------------------------------


def regularity(params: SolitonParams, tol: Tolerances, r: float | None = None) -> PipelineResult:
    reg = sol.regularize(params)
    rp, beta, n = reg.r_plus, reg.beta, params.n
    checks = []
    with workprec(40 + closed_form_dps(params, rp)):
        x = mpmath.mpf(rp)
        v_root = abs(x**n + params.a * x - mpmath.mpf(params.r0) ** n) / x**n
        vprime = profile_terms(params, x)[1]
        identity = float(beta * vprime / (4 * mpmath.pi) - 1)
        vprime = float(vprime)
    # a correctly rounded root leaves |V| ell^2/r_plus^2 ~ (n - 1 + s^n) eps; the
    # absolute bound is only checked where double precision can reach it
    conditioning = reg.slope_coeff * math.ulp(rp) / rp**n
    if conditioning <= tol.root_tol:
        checks.append(check_close("V_at_r_plus", float(v_root), 0.0, tol.root_tol))
    else:
        checks.append(check_upper("V_at_r_plus_within_half_ulp", float(v_root) / (conditioning / 2), 1.0 + 1e-9))
    checks.append(check_lower("V_prime_at_r_plus_positive", vprime, 0.0, strict=True))
    outside = min(float(profile_terms(params, mpmath.mpf(rr))[0]) for rr in _sample_grid(params, 50))
    checks.append(check_lower("V_positive_outside", outside, 0.0, strict=True))
    if params.a == 0:
        checks.append(check_close("r_plus_equals_r0", rp, params.r0, 0.0))
    checks.append(check_close("beta_times_V_prime", identity, 0.0, 1e-10))
    rho = 1e-2 * rp
    s1, s2 = sol.cone_angle_check(reg, [rho, rho / 2])
    checks.append(check_close("cone_ratio", s1.circumference_ratio, 1.0, 1e-4))
    c1 = (s1.circumference_ratio - 1) / rho**2
    c2 = (s2.circumference_ratio - 1) / (rho / 2) ** 2
    # deviation is O(rho^2): halving rho must divide it by at least ~4
    checks.append(check_upper("cone_ratio_rho2_decay", abs(c2 / c1) if c1 else 0.0, 1.1))
    (w,) = sol.cone_angle_check(reg, [1e-3 * rp], period=2 * beta)
    checks.append(check_close("cone_ratio_double_period", w.circumference_ratio, 2.0, 1e-3))
    h0 = sol.h_limit(reg)
    h0s = sol.h_limit_series(reg)
    checks.append(check_close("h_limit_vs_series", h0, h0s, tol.tol_fd, relative_to=max(1.0, abs(h0s))))
    s_list = [reg.vprime_at_rplus * rp * 10.0**-k for k in range(2, 7)]
    hv = sol.h_smoothness_probe(reg, s_list)
    checks.append(check_lower("h_bounded", -max(abs(x) for x in hv), -10 * max(1.0, abs(h0s))))
    rhos = rp * np.geomspace(1e-3, 1e-1, 9)
    samples = sol.cone_angle_check(reg, rhos)
    results = {
        "r_plus": rp,
        "beta": beta,
        "beta_closed_form": 4 * math.pi * params.ell**2 / (rp * (n - 1 + (params.r0 / rp) ** n)),
        "V_prime_at_r_plus": vprime,
        "four_pi_over_beta": 4 * math.pi / beta,
        "rho": rho,
        "cone_ratio": s1.circumference_ratio,
        "cone_rho2_coefficient": c1,
        "cone_ratio_curvature_estimate": 1 + float(profile_terms(params, mpmath.mpf(rp))[2]) / 12 * (2 * rho / vprime) ** 2,
        "cone_ratio_double_period": w.circumference_ratio,
        "h_limit": h0,
        "h_limit_series": h0s,
        "u_at_rho": s1.u_value,
    }
    series = {"rho": rhos, "ratio_minus_one": np.array([abs(s.circumference_ratio - 1) for s in samples])}
    return PipelineResult(results, checks, series)


# static ---------------------------------------------------------------------


def static_check(params: SolitonParams, tol: Tolerances, r: float | None = None) -> PipelineResult:
    lam = st.ads_lambda(params)
    kappa = abs(2 * lam / (params.n - 1))
    lapse = st.LapseAnsatz(c=1.0, d=0.0)
    ads = params.replace(a=0.0)
    ads_rep = st.vacuum_residual(ads, lapse, lam, st.default_grid(ads))
    checks = [check_close("ads_soliton_residual", ads_rep.max_abs, 0.0, 1e-10)]
    grid = st.default_grid(params)
    member = st.vacuum_residual(params, lapse, lam, grid)
    if params.a != 0:
        checks.append(check_lower("member_residual_with_N_r", member.max_abs, 1e-3, strict=True))
    verdict = st.solve_static_conditions(params, lam, grid)
    checks.append(check_close("static_verdict", float(verdict.is_ads_soliton), float(params.a == 0), 0.0))
    scaled = st.vacuum_residual(params, lapse.scaled(3.7), lam, grid)
    checks.append(check_close("lapse_scaling_invariance", float(np.max(np.abs(scaled.table - member.table))), 0.0, 1e-12))
    worst = 0.0
    oracle_lapse = st.LapseAnsatz(c=1.0, d=0.5 * (sol.chart_edge(params) or params.ell))
    for rr in _sample_grid(params, 6)[1:]:
        if cancellation_factor(params, float(rr)) > 1e2:
            continue
        closed = np.array(st.spacetime_ricci(params, oracle_lapse, float(rr)))
        num = st.spacetime_ricci_numeric(params, oracle_lapse, float(rr))
        ref = np.array(list(closed[:3]) + [closed[3]] * (params.n - 2))
        worst = max(worst, float(np.max(np.abs(num - ref) / np.maximum(1.0, np.abs(ref)))))
    checks.append(check_close("ricci_numeric_vs_closed", worst, 0.0, tol.tol_fd))
    results = {
        "Lambda": lam,
        "two_Lambda_over_n_minus_1": -kappa,
        "ads_max_residual": ads_rep.max_abs,
        "member_max_residual": member.max_abs,
        "fitted_c": verdict.fitted_c,
        "fitted_d": verdict.fitted_d,
        "fit_residual": verdict.fit_residual,
        "is_ads_soliton": verdict.is_ads_soliton,
    }
    series = {"r": grid, "components": member.components, "table": np.abs(member.table)}
    return PipelineResult(results, checks, series)


# complex structure ----------------------------------------------------------


def complex_check(params: SolitonParams, tol: Tolerances, r: float | None = None) -> PipelineResult:
    n = params.n
    if n % 2 or n < 4:
        raise UnsupportedDimensionError(f"complex needs even n >= 4, got n = {n}")
    k = (n - 2) // 2
    grid = _sample_grid(params, 8)
    angles = np.linspace(0.1, 2 * math.pi - 0.1, len(grid))
    sq, compat, nij, dom = 0.0, 0.0, 0.0, 0.0
    nij_series = []
    for rr, ang in zip(grid, angles):
        pt = ChartPoint(r=float(rr), phi=float(ang), thetas=tuple(0.3 * j for j in range(n - 2)))
        m = cx.j_matrix(params, pt).matrix
        g = metric_components(params, pt.coords())
        sq = max(sq, float(np.max(np.abs(m @ m + np.eye(n)))))
        compat = max(compat, float(np.max(np.abs(m.T @ g @ m - g)) / np.max(np.abs(g))))
        nv = cx.nijenhuis_norm(params, pt)
        nij_series.append(nv)
        nij = max(nij, nv)
        ff = cx.fundamental_form(params, pt)
        dom = max(dom, abs(ff.d_omega[0, 2, 2 + k] - 2 * rr) / (2 * rr))
    r_probe = probe_radius(params, r)
    ff = cx.fundamental_form(params, ChartPoint.at(params, r_probe))
    checks = [
        check_close("J_squared_plus_identity", sq, 0.0, 1e-12),
        check_close("g_compatibility", compat, 0.0, 1e-12),
        check_close("nijenhuis_max_norm", nij, 0.0, 1e-8),
        check_close("d_omega_r_theta_component", ff.d_omega[0, 2, 2 + k], 2 * r_probe, tol.tol_fd, relative_to=2 * r_probe),
        check_close("d_omega_grid_relative", dom, 0.0, tol.tol_fd),
    ]
    reg = sol.regularize(params)
    u0, a0 = cx.extension_limit(reg)
    checks.append(check_close("u_at_zero", u0, 1.0, 1e-6))
    checks.append(check_close("A_at_zero_rotation", float(np.max(np.abs(a0 - cx.ROTATION))), 0.0, 1e-6))
    rho = 1e-2 * reg.r_plus
    a_chart = cx.extension_matrix_from_chart(reg, rho, 0.7)
    a_closed = cx.extension_matrix(sol.u_function(reg, rho * rho), rho * math.cos(0.7), rho * math.sin(0.7))
    checks.append(check_close("A_chart_vs_closed", float(np.max(np.abs(a_chart - a_closed))), 0.0, tol.tol_fd))
    s0 = 1e-3 * reg.vprime_at_rplus * reg.r_plus
    u_vals = [sol.u_function(reg, s0 / 2**j) for j in range(4)]
    checks.append(check_lower("u_positive", min(u_vals), 0.0, strict=True))
    u1 = -sol.h_limit_series(reg) / 2
    e = [(u - 1 - u1 * s0 / 2**j) / (s0 / 2**j) ** 2 for j, u in enumerate(u_vals)]
    checks.append(check_upper("u_quadratic_remainder", abs(e[2] / e[1]) if e[1] else 0.0, 1.1))
    rhos = reg.r_plus * np.geomspace(1e-3, 1e-1, 9)
    a_dev = [float(np.max(np.abs(p.A - cx.ROTATION))) for p in cx.extension_probe(reg, rhos, angles=(0.7,))]
    results = {
        "k": k,
        "r": r_probe,
        "omega_r_phi": float(ff.omega[0, 1]),
        "omega_theta_pair": float(ff.omega[2, 2 + k]),
        "d_omega_r_theta_pair": float(ff.d_omega[0, 2, 2 + k]),
        "two_r": 2 * r_probe,
        "nijenhuis_max_norm": nij,
        "u_at_zero": u0,
        "u1": u1,
        "A00": float(a0[0, 0]),
        "A01": float(a0[0, 1]),
        "A10": float(a0[1, 0]),
        "A11": float(a0[1, 1]),
    }
    series = {"r": grid, "nijenhuis": np.array(nij_series), "rho": rhos, "A_deviation": np.array(a_dev)}
    return PipelineResult(results, checks, series)


# energy ---------------------------------------------------------------------


def _mean_curvature_limit(params: SolitonParams) -> float:
    """lim (H - H0) r^n from the same power-tail fit as the energies."""
    scale = en.asymptotic_scale(params)
    radii = [f * scale for f in en.RADII_FACTORS]
    with workprec(30 + 2 * params.n * 5):
        vals = []
        for rr in radii:
            x = mpmath.mpf(rr)
            v, v1, _ = profile_terms(params, x)
            h = (v1 / 2 + (params.n - 2) * v / x) / mpmath.sqrt(v)
            vals.append((h - mpmath.mpf(params.n - 1) / params.ell) * x**params.n)
        c0, _ = fit_power_tail(radii, vals, tail_exponents(params.n, len(radii) - 1))
        return float(c0)


def _density_limit(params: SolitonParams) -> float:
    scale = en.asymptotic_scale(params)
    radii = [f * scale for f in en.RADII_FACTORS]
    with workprec(30 + 2 * params.n * 5):
        vals = [en.hamiltonian_density(params, mpmath.mpf(rr)) * mpmath.mpf(rr) ** params.n for rr in radii]
        c0, _ = fit_power_tail(radii, vals, tail_exponents(params.n, len(radii) - 1))
        return float(c0)


def _compare_checks(params: SolitonParams, cmp: en.ComparisonReport) -> list[Check]:
    checks = [
        check_close("ratio_formula", cmp.E_HH_g / cmp.E_HH_hm, cmp.ratio, 1e-12, relative_to=max(1.0, cmp.ratio)),
        check_lower("ratio_positive", cmp.ratio, 0.0, strict=True),
        check_upper("ratio_at_most_one", cmp.ratio, 1.0),
    ]
    if params.a == 0:
        checks.append(check_close("ratio_equality_at_a_zero", cmp.ratio, 1.0, 1e-10))
    else:
        checks.append(check_upper("ratio_strict_for_a_nonzero", cmp.ratio, 1.0, strict=True))
    checks.append(check_lower("E_HH_g_at_least_E_HH_hm", cmp.E_HH_g - cmp.E_HH_hm, 0.0))
    return checks


def energy_check(params: SolitonParams, tol: Tolerances, r: float | None = None) -> PipelineResult:
    n = params.n
    rep = en.energy_report(params, tol=tol.tol_extrap)
    big = lambda x: max(1.0, abs(x))  # noqa: E731
    checks = [
        check_close("E_HH_extrapolated_vs_closed", rep.E_HH, rep.E_HH_closed, tol.tol_extrap, relative_to=big(rep.E_HH_closed)),
        check_close("E_HH_closed_forms_agree", rep.E_HH_closed_beta, rep.E_HH_closed, 1e-12, relative_to=big(rep.E_HH_closed)),
        check_upper("E_HH_negative", rep.E_HH, 0.0, strict=True),
        check_close("E_ham_extrapolated_vs_closed", rep.E_ham, rep.E_ham_closed, tol.tol_extrap, relative_to=big(rep.E_ham_closed)),
        check_close("E_HH_vs_scaled_E_ham", rep.ratio_check, 0.0, tol.tol_extrap, relative_to=big(rep.E_HH)),
    ]
    r_probe = probe_radius(params, r)
    hc = en.mean_curvature(params, r_probe)
    hn = en.mean_curvature_numeric(params, r_probe)
    checks.append(check_close("mean_curvature_numeric_vs_closed", hn, hc, tol.tol_fd, relative_to=big(hc)))
    r0n = params.r0**n
    hl = _mean_curvature_limit(params)
    checks.append(check_close("mean_curvature_r_n_coefficient", hl, r0n / (2 * params.ell), tol.tol_extrap, relative_to=big(r0n)))
    dl = _density_limit(params)
    checks.append(check_close("density_r_n_limit", dl, -r0n / params.ell, tol.tol_extrap, relative_to=big(r0n)))
    radii, rem, slope = en.density_tail(params, scale=en.tail_scale(params))
    corrected = en.corrected_tail_exponent(radii, rem)
    expected = n - 2 if params.a != 0 else n
    checks.append(check_close("density_remainder_exponent", corrected, expected, 1e-4))
    audit = en.falloff_audit(params)
    checks.append(check_close("falloff_a22_leading_term", audit.a22_leading_dev, 0.0, 1e-12))
    checks.append(check_close("falloff_a11_second_order", audit.a11_second_order, 1.0, 1e-3))
    fall = n - 1 if params.a != 0 else n
    checks.append(check_close("falloff_a11_exponent", audit.decay_exponent, fall, 0.05))
    cmp = en.compare_with_hm(params)
    checks += _compare_checks(params, cmp)
    results = {
        "r_plus": sol.find_r_plus(params),
        "beta": sol.period_beta(params),
        "lambda": params.lam,
        "G": params.G,
        "H0": rep.H0,
        "r": r_probe,
        "H": hc,
        "E_HH": rep.E_HH,
        "E_HH_closed": rep.E_HH_closed,
        "E_HH_closed_beta": rep.E_HH_closed_beta,
        "E_ham": rep.E_ham,
        "E_ham_closed": rep.E_ham_closed,
        "ratio_check": rep.ratio_check,
        "extrapolation_spread": rep.mass_limit.spread,
        "density_r_n_limit": dl,
        "density_tail_slope": slope,
        "density_tail_exponent_corrected": corrected,
        "falloff_exponent": audit.decay_exponent,
        "satisfies_rn_falloff": audit.satisfies_rn_falloff,
        "ratio_to_hm": cmp.ratio,
    }
    limit = rep.mass_limit.value
    series = {
        "r": np.array([t[0] for t in rep.mass_limit.table]),
        "mass_error": np.array([abs(t[1] - limit) for t in rep.mass_limit.table]),
        "tail_r": np.array(radii),
        "tail_remainder": np.abs(np.array(rem)),
    }
    return PipelineResult(results, checks, series)


# comparison -----------------------------------------------------------------


def compare(params: SolitonParams, tol: Tolerances, r: float | None = None) -> PipelineResult:
    cmp = en.compare_with_hm(params)
    checks = _compare_checks(params, cmp)
    n = params.n
    gap_s = en.scalar_inequality_gap(n, cmp.s)
    checks.append(check_lower("scalar_inequality_at_s", gap_s, 0.0))
    s_grid = np.linspace(0.0, 10.0, 1001)
    worst = min(float(np.min(en.scalar_inequality_gap(m, s_grid))) for m in range(3, 9))
    checks.append(check_lower("scalar_inequality_grid", worst, 0.0))
    results = {
        "r_plus": sol.find_r_plus(params),
        "s": cmp.s,
        "rbar0": cmp.rbar0,
        "E_HH_g": cmp.E_HH_g,
        "E_HH_hm": cmp.E_HH_hm,
        "ratio": cmp.ratio,
        "scalar_gap": gap_s,
    }
    return PipelineResult(results, checks, {})


# aggregate ------------------------------------------------------------------

MODULE_COMMANDS = {
    "curvature": curvature,
    "regularity": regularity,
    "static-check": static_check,
    "complex": complex_check,
    "energy": energy_check,
    "compare": compare,
}


def verify_all(params: SolitonParams, tol: Tolerances, r: float | None = None) -> PipelineResult:
    """Every module that applies to ``params``; skipped ones are listed in the results."""
    has_root = sol.chart_edge(params) > 0
    results, checks, series, skipped = {}, [], {}, []
    for name, fn in MODULE_COMMANDS.items():
        if name == "complex" and (params.n % 2 or params.n < 4):
            skipped.append("complex")
            continue
        if name in ("regularity", "complex", "energy", "compare") and not has_root:
            skipped.append(name)
            continue
        out = fn(params, tol, r)
        results.update({f"{name}.{k}": v for k, v in out.results.items()})
        checks += [c.renamed(f"{name}.") for c in out.checks]
        series[name] = out.series
    results["skipped"] = ",".join(skipped) if skipped else "none"
    return PipelineResult(results, checks, series)


COMMANDS = dict(MODULE_COMMANDS, **{"verify-all": verify_all})


def run_pipeline(command: str, params: SolitonParams, tol: Tolerances, r: float | None = None) -> PipelineResult:
    return COMMANDS[command](params, tol, r)
