import numpy as np
import pytest

from hm_lab.errors import DomainError
from hm_lab.geometry import SolitonParams, eval_profile
from hm_lab.soliton import find_r_plus
from hm_lab.static import (
    LapseAnsatz,
    ads_lambda,
    default_grid,
    solve_static_conditions,
    spacetime_ricci,
    spacetime_ricci_numeric,
    vacuum_residual,
)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_ads_soliton_is_vacuum(n):
    p = SolitonParams(n=n, ell=1.7)
    rep = vacuum_residual(p, LapseAnsatz(), ads_lambda(p), default_grid(p))
    assert len(rep.r_grid) == 64
    assert rep.max_abs < 1e-10
    assert rep.components[:3] == ("t", "r", "phi")


def test_deformed_member_is_not_vacuum():
    p = SolitonParams(n=3, a=1.0)
    rep = vacuum_residual(p, LapseAnsatz(), ads_lambda(p), default_grid(p))
    assert rep.max_abs > 1e-3


def test_shifted_lapse_is_not_vacuum():
    p = SolitonParams(n=3)
    rep = vacuum_residual(p, LapseAnsatz(c=1.0, d=1.0), ads_lambda(p), default_grid(p))
    assert rep.max_abs > 1e-3


def test_rr_minus_phiphi_combination():
    # Ric(V^1/2 d_r, V^1/2 d_r) - Ric(V^-1/2 d_phi, V^-1/2 d_phi) = -N''V/N
    p = SolitonParams(n=4, a=0.6)
    for lapse, expect_zero in ((LapseAnsatz(), True), (LapseAnsatz.general(lambda r: (r * r, 2 * r, 2 + 0 * r)), False)):
        for r in (2.0, 5.0):
            v = eval_profile(p, r)[0]
            _, rr, pp, _ = spacetime_ricci(p, lapse, r)
            comb = v * rr - pp / v
            N, _, N2 = lapse(r)
            assert comb == pytest.approx(-N2 * v / N, abs=1e-10)
            assert (abs(comb) < 1e-10) == expect_zero


def test_tt_identity_at_twenty_radii():
    n, ell = 3, 1.0
    p = SolitonParams(n=n, ell=ell)
    lam = ads_lambda(p)
    for r in np.geomspace(1.1, 50.0, 20):
        v, v1, _ = eval_profile(p, r)
        tt, *_ = spacetime_ricci(p, LapseAnsatz(), r)
        assert tt / r**2 == pytest.approx((v1 + (n - 2) * v / r) / r, rel=1e-12)
        assert tt / r**2 == pytest.approx(n / ell**2, rel=1e-12)
        assert tt / r**2 == pytest.approx(-2 * lam / (n - 1), rel=1e-12)


def test_numeric_ricci_matches_closed():
    p = SolitonParams(n=4, a=-0.8)
    lapse = LapseAnsatz(c=1.0, d=0.5 * find_r_plus(p))
    for r in (2.0, 4.0):
        num = spacetime_ricci_numeric(p, lapse, r)
        tt, rr, pp, th = spacetime_ricci(p, lapse, r)
        ref = [tt, rr, pp, th, th]
        for got, want in zip(num, ref):
            assert abs(got - want) <= 1e-6 * max(1.0, abs(want))


def test_scaling_covariance():
    p = SolitonParams(n=5, a=1.3, r0=0.8)
    grid = default_grid(p, count=16)
    base = vacuum_residual(p, LapseAnsatz(c=1.0, d=0.2), ads_lambda(p), grid)
    for kappa in (0.01, 3.7, 250.0):
        scaled = vacuum_residual(p, LapseAnsatz(c=1.0, d=0.2).scaled(kappa), ads_lambda(p), grid)
        assert np.allclose(scaled.table, base.table, rtol=1e-12, atol=1e-14)


def test_verdicts():
    p = SolitonParams(n=3)
    ok = solve_static_conditions(p, ads_lambda(p))
    assert ok.is_ads_soliton
    assert abs(ok.fitted_d) < 1e-8
    assert ok.fitted_c > 0
    assert not solve_static_conditions(SolitonParams(n=3, a=0.5), ads_lambda(p)).is_ads_soliton
    assert not solve_static_conditions(p, -1.0).is_ads_soliton


def test_verdict_needs_negative_lambda():
    with pytest.raises(DomainError):
        solve_static_conditions(SolitonParams(n=3), 0.0)


def test_nonpositive_lapse_refused():
    p = SolitonParams(n=3)
    with pytest.raises(DomainError):
        spacetime_ricci(p, LapseAnsatz(c=-1.0), 2.0)
