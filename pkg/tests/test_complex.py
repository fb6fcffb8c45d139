import math

import numpy as np
import pytest

from conftest import random_member
from hm_lab.complex_structure import (
    ROTATION,
    extension_limit,
    extension_matrix,
    extension_matrix_from_chart,
    extension_probe,
    fundamental_form,
    j_matrix,
    nijenhuis_norm,
    nijenhuis_tensor,
)
from hm_lab.errors import UnsupportedDimensionError
from hm_lab.geometry import ChartPoint, SolitonParams, eval_profile, metric_components
from hm_lab.numerics import loglog_slope
from hm_lab.soliton import find_r_plus, regularize


def test_j_squares_to_minus_identity_and_is_compatible():
    p = SolitonParams(n=4)
    pt = ChartPoint.at(p, 2.0)
    J = j_matrix(p, pt).matrix
    assert np.max(np.abs(J @ J + np.eye(4))) < 1e-12
    g = metric_components(p, pt.coords())
    assert np.max(np.abs(J.T @ g @ J - g)) < 1e-12


def test_j_on_dr():
    p = SolitonParams(n=4)
    J = j_matrix(p, ChartPoint.at(p, 2.0)).matrix
    v = eval_profile(p, 2.0)[0]
    dr = np.array([1.0, 0, 0, 0])
    # (J dr)(X) = dr(J X)
    assert J.T @ dr == pytest.approx([0.0, v, 0.0, 0.0], abs=1e-15)


def test_random_points_compatible(rng):
    for _ in range(50):
        p = random_member(rng, ns=(4, 6))
        pt = ChartPoint.at(p, find_r_plus(p) * rng.uniform(1.05, 10.0), phi=rng.uniform(0, 1))
        J = j_matrix(p, pt).matrix
        g = metric_components(p, pt.coords())
        assert np.max(np.abs(J @ J + np.eye(p.n))) < 1e-12
        assert np.max(np.abs(J.T @ g @ J - g)) <= 1e-12 * np.max(np.abs(g))


@pytest.mark.parametrize("n", [4, 6])
def test_nijenhuis_vanishes(rng, n):
    for _ in range(50):
        p = random_member(rng, ns=(n,))
        pt = ChartPoint.at(p, find_r_plus(p) * rng.uniform(1.05, 10.0))
        assert nijenhuis_norm(p, pt) < 1e-8


def test_nijenhuis_example_and_torus_block():
    p = SolitonParams(n=4, a=1.0)
    N = nijenhuis_tensor(p, ChartPoint.at(p, 2.0))
    assert np.max(np.abs(N)) < 1e-8
    assert np.all(N[2:, 2:, 2:] == 0.0)


def test_fundamental_form_example():
    p = SolitonParams(n=4)
    ff = fundamental_form(p, ChartPoint.at(p, 2.0))
    assert ff.omega[0, 1] == pytest.approx(1.0, abs=1e-14)
    assert ff.omega[2, 3] == pytest.approx(4.0, abs=1e-14)
    assert ff.d_omega[0, 2, 3] == pytest.approx(4.0, abs=1e-6)
    assert ff.d_omega[1, 2, 3] == pytest.approx(0.0, abs=1e-12)
    assert ff.d_omega_norm > 1.0  # not Kaehler


def test_d_omega_on_grid():
    p = SolitonParams(n=6, a=-0.7, ell=1.4)
    for r in (1.5, 3.0, 6.0):
        dw = fundamental_form(p, ChartPoint.at(p, r)).d_omega
        assert dw[0, 2, 4] == pytest.approx(2 * r, abs=1e-6)
        assert dw[0, 3, 5] == pytest.approx(2 * r, abs=1e-6)
        assert dw[0, 2, 3] == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("n", [3, 5])
def test_odd_dimension_refused(n):
    p = SolitonParams(n=n)
    with pytest.raises(UnsupportedDimensionError):
        j_matrix(p, ChartPoint.at(p, 2.0))
    with pytest.raises(UnsupportedDimensionError):
        extension_limit(regularize(p))


def test_extension_at_origin():
    reg = regularize(SolitonParams(n=4, a=1.0))
    u0, A0 = extension_limit(reg)
    assert u0 == pytest.approx(1.0, abs=1e-6)
    assert np.max(np.abs(A0 - ROTATION)) < 1e-6


def test_extension_deviation_is_quadratic():
    reg = regularize(SolitonParams(n=4, a=-1.5, r0=1.2))
    rhos = np.geomspace(1e-3, 1e-2, 5) * reg.r_plus
    probes = extension_probe(reg, rhos, angles=(0.7,))
    dev = [np.max(np.abs(pr.A - ROTATION)) for pr in probes]
    assert loglog_slope(rhos, dev) == pytest.approx(2.0, abs=0.05)


def test_extension_matrix_squares_to_minus_identity():
    A = extension_matrix(1.3, 0.2, -0.4)
    assert np.max(np.abs(A @ A + np.eye(2))) < 1e-13
    assert np.allclose(extension_matrix(1.0, 0.3, 0.5), ROTATION, atol=1e-15)


def test_extension_matches_chart_pushforward():
    reg = regularize(SolitonParams(n=4, a=0.5))
    for rho in (1e-2, 1e-1):
        for angle in (0.4, 2.0, 5.1):
            (probe,) = extension_probe(reg, [rho], angles=(angle,))
            chart = extension_matrix_from_chart(reg, rho, angle)
            assert np.max(np.abs(chart - probe.A)) < 1e-8
            assert math.isfinite(probe.u_value)
