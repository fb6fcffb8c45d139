import math

import mpmath
import numpy as np
import pytest

from hm_lab.errors import ConvergenceError
from hm_lab.numerics import (
    adaptive,
    bisect,
    derivative,
    fit_power_tail,
    gradient,
    jet,
    last_sign_change,
    loglog_slope,
    metric_curvature,
    richardson_limit,
    safe_newton,
    tail_exponents,
    torus_integral,
    workprec,
)


def test_derivative_of_sin():
    assert derivative(math.sin, 0.7, 1e-3) == pytest.approx(math.cos(0.7), abs=1e-12)


def test_gradient_layout():
    f = lambda x: np.array([x[0] ** 2 * x[1], math.exp(x[1])])  # noqa: E731
    g = gradient(f, np.array([1.5, 0.3]), 1e-3)
    # g[i] = d_i f
    assert g[0] == pytest.approx([2 * 1.5 * 0.3, 0.0], abs=1e-10)
    assert g[1] == pytest.approx([1.5**2, math.exp(0.3)], abs=1e-10)


def test_jet_hessian_with_mixed_terms():
    f = lambda x: x[0] ** 3 * x[1] + math.sin(x[0] * x[1])  # noqa: E731
    x = np.array([0.8, 1.1])
    _, d, dd = jet(f, x, 1e-3)
    c = math.cos(0.88)
    s = math.sin(0.88)
    assert d == pytest.approx([3 * 0.64 * 1.1 + 1.1 * c, 0.512 + 0.8 * c], abs=1e-9)
    mixed = 3 * 0.64 + c - 0.88 * s
    assert dd[0, 1] == pytest.approx(mixed, abs=1e-7)
    assert dd[1, 0] == pytest.approx(mixed, abs=1e-7)
    assert dd[1, 1] == pytest.approx(-0.64 * s, abs=1e-7)


def test_jet_in_mpmath():
    with workprec(40):
        x = np.array([mpmath.mpf("0.5")], dtype=object)
        _, d, dd = jet(lambda y: mpmath.exp(y[0]), x, mpmath.mpf("1e-8"))
        assert abs(d[0] - mpmath.exp(mpmath.mpf("0.5"))) < mpmath.mpf("1e-25")
        assert abs(dd[0, 0] - mpmath.exp(mpmath.mpf("0.5"))) < mpmath.mpf("1e-15")


def test_richardson_limit_removes_orders():
    lim, table = richardson_limit(lambda s: 2.0 + 3 * s - 5 * s * s, 0.1, orders=(1, 2))
    assert lim == pytest.approx(2.0, abs=1e-14)
    assert len(table) == 3


def test_roots():
    f = lambda x: x**3 + x - 1  # noqa: E731
    lo, hi = last_sign_change(f, 1e-3, 10.0)
    root = bisect(f, lo, hi)
    assert abs(f(root)) < 1e-15
    newton = safe_newton(f, lambda x: 3 * x * x + 1, 0.0, 1.0, x0=0.5)
    assert newton == pytest.approx(root, rel=1e-15)


def test_last_sign_change_picks_largest_root():
    f = lambda x: (x - 0.5) * (x - 2.0) * (x - 3.0)  # noqa: E731
    lo, hi = last_sign_change(f, 0.1, 10.0)
    assert lo < 3.0 < hi


def test_tail_exponents():
    assert tail_exponents(3, 4) == [1, 2, 3, 4]
    assert tail_exponents(5, 4) == [3, 4, 5, 7]  # 6 = 4j + 5k - 5 has no solution


def test_fit_power_tail_exact():
    radii = [100.0, 300.0, 1000.0, 3000.0]
    vals = [7.5 + 2 / r - 3 / r**2 + 0.5 / r**3 for r in radii]
    with workprec(40):
        c0, coeffs = fit_power_tail(radii, vals, [1, 2, 3])
    assert float(c0) == pytest.approx(7.5, abs=1e-13)
    assert [float(c) for c in coeffs] == pytest.approx([2, -3, 0.5], rel=1e-6)


def test_loglog_slope():
    x = np.geomspace(1, 100, 7)
    assert loglog_slope(x, 3 * x**-2.5) == pytest.approx(-2.5)


def test_adaptive_integrable_endpoint():
    # substitution-free integrable singularity at 0
    assert adaptive(lambda t: 1 / math.sqrt(t), 0.0, 4.0, rtol=1e-10) == pytest.approx(4.0, rel=1e-10)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_adaptive_failure_raises():
    with pytest.raises(ConvergenceError):
        adaptive(lambda t: 1.0 / t, 0.0, 1.0)


def test_torus_integral_trapezoid():
    periods = (2 * math.pi, 3.0)
    val = torus_integral(lambda a, b: 1 + math.cos(a) * math.sin(2 * math.pi * b / 3), periods, points_per_dim=8)
    assert val == pytest.approx(6 * math.pi, rel=1e-14)
    assert torus_integral(lambda *x: 2.0, (1.5, 2.0, 3.0)) == pytest.approx(18.0)


def test_metric_curvature_round_sphere():
    R = 1.7

    def g(x):
        return np.array([[R * R, 0.0], [0.0, (R * math.sin(x[0])) ** 2]])

    mc = metric_curvature(g, np.array([1.1, 0.4]), 1e-3)
    assert mc.scalar == pytest.approx(2 / R**2, rel=1e-7)
    assert mc.christoffel[0, 1, 1] == pytest.approx(-math.sin(1.1) * math.cos(1.1), rel=1e-8)
