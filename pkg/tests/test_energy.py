import math

import mpmath
import numpy as np
import pytest

from conftest import random_member
from hm_lab import energy as en
from hm_lab.errors import ConvergenceError, DomainError
from hm_lab.geometry import SolitonParams
from hm_lab.soliton import find_r_plus, period_beta


def test_mean_curvature_example():
    p = SolitonParams(n=3)
    assert en.mean_curvature(p, 2.0) == pytest.approx(3.875 / math.sqrt(3.5), abs=1e-14)
    assert en.mean_curvature(p, 2.0) == pytest.approx(2.0712746248, abs=1e-10)
    assert en.mean_curvature_numeric(p, 2.0) == pytest.approx(3.875 / math.sqrt(3.5), abs=1e-8)


def test_mean_curvature_numeric_random(rng):
    for _ in range(10):
        p = random_member(rng)
        r = find_r_plus(p) * rng.uniform(1.2, 8.0)
        assert en.mean_curvature_numeric(p, r) == pytest.approx(en.mean_curvature(p, r), rel=1e-7)


def test_mean_curvature_limit():
    p = SolitonParams(n=5, ell=1.5, a=2.0)
    H0 = en.mean_curvature_reference(p)
    assert H0 == pytest.approx(4 / 1.5)
    devs = [abs(en.mean_curvature(p, r) - H0) for r in (1e1, 1e2, 1e3)]
    assert devs[2] < devs[1] < devs[0]
    assert devs[2] < 1e-9


def test_mean_curvature_hyperbolic_reference():
    p = SolitonParams(n=4, ell=2.0, r0=0.0)
    for r in (0.1, 1.0, 50.0):
        assert en.mean_curvature(p, r) == pytest.approx(1.5, abs=1e-14)


def test_mean_curvature_inside_refused():
    with pytest.raises(DomainError):
        en.mean_curvature(SolitonParams(n=3), 0.5)


def test_mass_example(hm3):
    rep = en.energy_report(hm3)
    assert abs(rep.E_HH + 1 / 12) < 1e-8
    assert abs(rep.E_ham + 1 / 6) < 1e-8
    assert abs(rep.E_HH - (hm3.lam * hm3.ell / (2 * hm3.G)) * rep.E_ham) < 1e-8
    assert rep.E_HH_closed == pytest.approx(-1 / 12, abs=1e-15)
    assert rep.E_ham_closed == pytest.approx(-1 / 6, abs=1e-15)


def test_finite_radius_mass_converges(hm3):
    vals = [abs(en.mass_integrand(hm3, r) + 1 / 12) for r in (10.0, 100.0, 1000.0)]
    assert vals[2] < vals[1] < vals[0]


@pytest.mark.parametrize("a", [-5.0, -2.5, -1.0, 0.0, 1.0, 2.5, 5.0])
def test_mass_negative(a):
    p = SolitonParams(n=3, a=a)
    assert en.mass_closed_form(p) < 0
    assert en.hawking_horowitz_mass(p).value < 0


def test_closed_forms_agree(rng):
    for _ in range(30):
        p = random_member(rng)
        assert en.mass_closed_form_beta(p) == pytest.approx(en.mass_closed_form(p), rel=1e-12)


def test_extrapolation_matches_closed_form(rng):
    for _ in range(10):
        p = random_member(rng)
        mass = en.hawking_horowitz_mass(p)
        ham = en.hamiltonian_energy(p)
        assert abs(mass.value - en.mass_closed_form(p)) < 1e-8 * max(1.0, abs(en.mass_closed_form(p)))
        assert abs(ham.value - en.hamiltonian_closed_form(p)) < 1e-8 * max(1.0, abs(en.hamiltonian_closed_form(p)))


def test_density_numeric_matches_closed():
    for p in (SolitonParams(n=3, a=1.0), SolitonParams(n=4, ell=1.5, a=-2.0, r0=0.8)):
        for r in (2.0, 5.0, 20.0):
            closed = float(en.hamiltonian_density(p, r))
            assert en.hamiltonian_density_numeric(p, r) == pytest.approx(closed, rel=1e-7, abs=1e-12)


@pytest.mark.parametrize("n, a", [(3, 0.0), (3, 2.0), (3, -2.0), (4, 1.0), (5, -0.5)])
def test_density_tail(n, a):
    p = SolitonParams(n=n, a=a)
    radii, rem, _ = en.density_tail(p, scale=en.tail_scale(p))
    expected = n if a == 0 else n - 2
    assert en.corrected_tail_exponent(radii, rem) == pytest.approx(expected, abs=1e-4)
    coeff = en.density_tail_coefficient(p)
    assert rem[-1] * radii[-1] ** expected / coeff == pytest.approx(1.0, abs=1e-2)


def test_density_times_rn_limit():
    p = SolitonParams(n=4, a=0.7, r0=1.3, ell=0.8)
    r = mpmath.mpf(1e6)
    with mpmath.workdps(60):
        val = float(en.hamiltonian_density(p, r) * r**4)
    assert val == pytest.approx(-(1.3**4) / 0.8, rel=1e-6)


def test_corrected_exponent_recovers_synthetic_series():
    r = np.geomspace(1e2, 1e4, 9)
    rem = 3.0 * r**-1.0 * (1 - 5.0 / r + 7.0 / r**2)
    assert en.corrected_tail_exponent(r, rem) == pytest.approx(1.0, abs=1e-6)


def test_falloff_audit():
    p = SolitonParams(n=3, a=1.5)
    fa = en.falloff_audit(p)
    assert fa.a22_leading_dev < 1e-12
    assert fa.a11_second_order == pytest.approx(1.0, abs=1e-3)
    assert fa.decay_exponent == pytest.approx(2.0, abs=0.05)
    assert not fa.satisfies_rn_falloff
    fa0 = en.falloff_audit(SolitonParams(n=3))
    assert fa0.decay_exponent == pytest.approx(3.0, abs=0.05)
    assert fa0.satisfies_rn_falloff


def test_compare_at_zero_deformation():
    cmp = en.compare_with_hm(SolitonParams(n=3))
    assert cmp.s == 1.0
    assert cmp.ratio == 1.0
    assert cmp.E_HH_g == pytest.approx(cmp.E_HH_hm, rel=1e-14)


def test_compare_example():
    p = SolitonParams(n=3, a=1.0)
    cmp = en.compare_with_hm(p)
    assert cmp.s == pytest.approx(1.46557, abs=1e-5)
    assert cmp.ratio == pytest.approx((3 * cmp.s / (2 + cmp.s**3)) ** 3, rel=1e-14)
    assert cmp.ratio < 1
    assert cmp.inequality_holds
    assert cmp.E_HH_g / cmp.E_HH_hm == pytest.approx(cmp.ratio, rel=1e-12)
    assert en.scalar_inequality_gap(3, cmp.s) > 0
    # the companion has the same phi period
    assert period_beta(en.hm_companion(p)) == pytest.approx(period_beta(p), rel=1e-12)


def test_scalar_inequality_grid():
    s = np.linspace(0.0, 10.0, 2001)
    for n in range(3, 9):
        gap = en.scalar_inequality_gap(n, s)
        assert np.all(gap >= -1e-12)
        assert gap[np.argmin(np.abs(s - 1))] == 0.0


def test_noisy_limit_raises():
    p = SolitonParams(n=3)
    # alternating noise has no power-law tail
    with pytest.raises(ConvergenceError):
        en._limit(p, lambda r: 1 + (-1) ** int(mpmath.log10(r) * 2) * 1e-3, en.RADII_FACTORS, en.TOL_EXTRAP)
