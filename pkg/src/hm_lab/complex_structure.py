"""The almost-complex structure J for n = 2 + 2k.

J acts on the coframe by

    dr / V -> dphi,   dphi -> -dr / V,   dth_j -> dth_{k+j},   dth_{k+j} -> -dth_j.

It is stored as one matrix ``M`` with ``J(dx^a) = sum_c M[a, c] dx^c``; the
same array gives the action on vectors, ``J d_c = sum_a M[a, c] d_a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import UnsupportedDimensionError
from .geometry import (
    ChartPoint,
    SolitonParams,
    _require_chart,
    fd_precision,
    metric_components,
    profile_terms,
)
from .numerics.differentiate import gradient
from .numerics.extrapolate import richardson_limit
from .numerics.tensors import exterior_derivative_2form, nijenhuis
from .soliton import RegularizedSoliton, invert_profile, u_function, v_near_root

__all__ = [
    "AlmostComplexAt",
    "ExtensionMatrixA",
    "FundamentalForm",
    "j_matrix",
    "j_field",
    "nijenhuis_norm",
    "nijenhuis_tensor",
    "fundamental_form",
    "extension_matrix",
    "extension_matrix_from_chart",
    "extension_probe",
    "extension_limit",
    "ROTATION",
]

ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])


@dataclass(frozen=True, eq=False)
class AlmostComplexAt:
    point: ChartPoint
    matrix: np.ndarray
    k: int


@dataclass(frozen=True, eq=False)
class ExtensionMatrixA:
    rho: float
    angle: float
    A: np.ndarray
    u_value: float


@dataclass(frozen=True, eq=False)
class FundamentalForm:
    omega: np.ndarray
    d_omega: np.ndarray
    d_omega_norm: float


def _half_dim(params: SolitonParams) -> int:
    n = params.n
    if n % 2 or n < 4:
        raise UnsupportedDimensionError(f"J needs n = 2 + 2k with k >= 1, got n = {n}")
    return (n - 2) // 2


def j_field(params: SolitonParams, x):
    """Matrix of J at coordinates ``x`` (float or mpf arithmetic)."""
    k = _half_dim(params)
    n = params.n
    v, _, _ = profile_terms(params, x[0])
    m = np.zeros((n, n), dtype=object if isinstance(x[0], mpmath.mpf) else float)
    m[0, 1] = v
    m[1, 0] = -1 / v
    for j in range(k):
        m[2 + j, 2 + k + j] = 1
        m[2 + k + j, 2 + j] = -1
    return m


def j_matrix(params: SolitonParams, point: ChartPoint) -> AlmostComplexAt:
    k = _half_dim(params)
    _require_chart(params, point.r)
    return AlmostComplexAt(point=point, matrix=j_field(params, point.coords()), k=k)


def _fd_setup(params: SolitonParams, r: float, h: float | None):
    edge = _require_chart(params, r)
    dps = fd_precision(params, r)
    d = min(r - edge, r)
    if h is None:
        h = 4e-3 * d if dps is None else 1e-6 * d
    return h, dps


def nijenhuis_tensor(params: SolitonParams, point: ChartPoint, h: float | None = None) -> np.ndarray:
    """``N[c, a, b]``, the Nijenhuis tensor on coordinate fields, by finite differences."""
    _half_dim(params)
    h, dps = _fd_setup(params, point.r, h)
    return nijenhuis(lambda x: j_field(params, x), point.coords(), h, dps=dps)


def nijenhuis_norm(params: SolitonParams, point: ChartPoint, h: float | None = None) -> float:
    return float(np.max(np.abs(nijenhuis_tensor(params, point, h))))


def _omega(params: SolitonParams, x):
    g = metric_components(params, x)
    return np.dot(g, j_field(params, x))


def fundamental_form(params: SolitonParams, point: ChartPoint, h: float | None = None) -> FundamentalForm:
    """omega(X, Y) = g(X, J Y) and its exterior derivative by finite differences."""
    _half_dim(params)
    _require_chart(params, point.r)
    omega = _omega(params, point.coords())
    h, dps = _fd_setup(params, point.r, h)
    d_omega = exterior_derivative_2form(lambda x: _omega(params, x), point.coords(), h, dps=dps)
    return FundamentalForm(omega=omega, d_omega=d_omega, d_omega_norm=float(np.max(np.abs(d_omega))))


def extension_matrix(u: float, x: float, y: float) -> np.ndarray:
    """Matrix A with J(dx, dy) = (dx, dy) A in the Cartesian chart around r_plus."""
    rho2 = x * x + y * y
    inv = 1.0 / u
    core = np.array(
        [
            [x * y * (inv - u), (1 - inv) * x * x + (1 - u) * y * y],
            [(u - 1) * x * x + (inv - 1) * y * y, x * y * (u - inv)],
        ]
    )
    return core / rho2 + ROTATION


def extension_matrix_from_chart(reg: RegularizedSoliton, rho: float, angle: float) -> np.ndarray:
    """A obtained by pushing the (r, phi) matrix of J through the chart map.

    The Jacobian of (r, phi) -> (x, y) = sqrt(V) (cos, sin)(2 pi phi / beta) is
    taken by finite differences, independently of the closed form for A.
    """
    delta = invert_profile(reg, rho * rho)
    v = v_near_root(reg, delta)

    # differentiate in the scaled coordinates (r - r_plus) / delta and 2 pi phi / beta,
    # which are both of unit size, then convert back to (r, phi)
    def chart(q):
        rad = math.sqrt(v_near_root(reg, q[0] * delta))
        return np.array([rad * math.cos(q[1]), rad * math.sin(q[1])])

    jac = gradient(chart, np.array([1.0, angle]), 1e-3).T  # jac[a, b] = d new_a / d q_b
    jac = jac * np.array([1.0 / delta, 2 * math.pi / reg.beta])
    j_old = np.array([[0.0, v], [-1.0 / v, 0.0]])  # vector action in (r, phi)
    j_new = jac @ j_old @ np.linalg.inv(jac)
    return j_new.T


def extension_probe(
    reg: RegularizedSoliton,
    rho_list: Iterable[float],
    angles: Sequence[float] = (0.3, 1.2, 2.5, 4.0),
) -> list[ExtensionMatrixA]:
    _half_dim(reg.params)
    out = []
    for rho in rho_list:
        rho = float(rho)
        u = u_function(reg, rho * rho)
        for ang in angles:
            out.append(
                ExtensionMatrixA(
                    rho=rho,
                    angle=float(ang),
                    A=extension_matrix(u, rho * math.cos(ang), rho * math.sin(ang)),
                    u_value=u,
                )
            )
    return out


def extension_limit(reg: RegularizedSoliton, angle: float = 0.7, rho: float | None = None):
    """(u(0+), A(0)) by Richardson extrapolation in s = rho^2."""
    _half_dim(reg.params)
    if rho is None:
        rho = 1e-2 * reg.r_plus
    s0 = rho * rho
    u0, _ = richardson_limit(lambda s: u_function(reg, s), s0, orders=(1, 2))

    def a_at(s):
        r = math.sqrt(s)
        return extension_matrix(u_function(reg, s), r * math.cos(angle), r * math.sin(angle))

    a0, _ = richardson_limit(a_at, s0, orders=(1, 2))
    return float(u0), np.asarray(a0)
