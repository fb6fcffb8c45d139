"""Coordinate tensor calculus driven by finite differences of a metric.

This is the independent oracle for every closed-form curvature expression:
it knows nothing about warped products.  Given any callable ``metric(x)``
returning the matrix ``g_ij(x)`` it produces Christoffel symbols, the
Riemann and Ricci tensors and the scalar curvature.

Conventions (chosen so that the round sphere has positive Ricci):

    Gamma[i, j, k]  = Gamma^i_{jk}
    R[r, s, m, v]   = R^r_{s m v} = d_m Gamma^r_{v s} - d_v Gamma^r_{m s}
                      + Gamma^r_{m l} Gamma^l_{v s} - Gamma^r_{v l} Gamma^l_{m s}
    Ric[s, v]       = R^r_{s r v}
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np

from .differentiate import gradient, jet

__all__ = [
    "MetricCurvature",
    "workprec",
    "as_working",
    "to_float",
    "inverse",
    "christoffel",
    "christoffel_derivative",
    "riemann",
    "metric_curvature",
    "nijenhuis",
    "exterior_derivative_2form",
]


@contextlib.contextmanager
def workprec(dps: int | None):
    """Run the block at ``dps`` decimal digits, or in plain floats if None."""
    if dps is None:
        yield
    else:
        with mpmath.workdps(dps):
            yield


def as_working(x, dps: int | None):
    """Convert an array to the scalar type used at precision ``dps``."""
    if dps is None:
        return np.asarray(x, dtype=float)
    return np.array([mpmath.mpf(v) for v in np.ravel(x)], dtype=object).reshape(np.shape(x))


def to_float(a):
    a = np.asarray(a)
    if a.dtype == object:
        return np.vectorize(float, otypes=[float])(a) if a.size else a.astype(float)
    return a.astype(float)


def inverse(m):
    m = np.asarray(m)
    if m.dtype != object:
        return np.linalg.inv(m)
    inv = mpmath.matrix(m.tolist()) ** -1
    return np.array(inv.tolist(), dtype=object)


def christoffel(ginv, dg):
    """Gamma^i_{jk} from the inverse metric and ``dg[m, i, j] = d_m g_ij``."""
    lower = 0.5 * (
        np.einsum("jlk->ljk", dg) + np.einsum("klj->ljk", dg) - dg
    )
    return np.einsum("il,ljk->ijk", ginv, lower)


def christoffel_derivative(ginv, dg, ddg):
    """``out[m, i, j, k] = d_m Gamma^i_{jk}``; ``ddg[m, p, i, j] = d_m d_p g_ij``."""
    lower = 0.5 * (np.einsum("jlk->ljk", dg) + np.einsum("klj->ljk", dg) - dg)
    dlower = 0.5 * (
        np.einsum("mjlk->mljk", ddg) + np.einsum("mklj->mljk", ddg) - ddg
    )
    dginv = -np.einsum("ia,mab,bl->mil", ginv, dg, ginv)
    return np.einsum("mil,ljk->mijk", dginv, lower) + np.einsum("il,mljk->mijk", ginv, dlower)


def riemann(gamma, dgamma):
    d1 = np.einsum("mrvs->rsmv", dgamma)
    d2 = np.einsum("vrms->rsmv", dgamma)
    q1 = np.einsum("rml,lvs->rsmv", gamma, gamma)
    q2 = np.einsum("rvl,lms->rsmv", gamma, gamma)
    return d1 - d2 + q1 - q2


@dataclass(frozen=True)
class MetricCurvature:
    metric: np.ndarray
    inverse: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float


def metric_curvature(metric: Callable, x, h, dps: int | None = None) -> MetricCurvature:
    """Curvature of ``metric`` at ``x`` from Richardson-extrapolated differences.

    With ``dps`` set, the differences and all contractions are carried out in
    mpmath at that many digits and the results rounded to floats at the end.
    """
    with workprec(dps):
        xw = as_working(x, dps)
        hw = h if dps is None else mpmath.mpf(h)
        g, dg, ddg = jet(metric, xw, hw)
        ginv = inverse(g)
        gamma = christoffel(ginv, dg)
        dgamma = christoffel_derivative(ginv, dg, ddg)
        riem = riemann(gamma, dgamma)
        ric = np.einsum("rsrv->sv", riem)
        scal = np.einsum("ij,ij->", ginv, ric)
        return MetricCurvature(
            metric=to_float(g),
            inverse=to_float(ginv),
            christoffel=to_float(gamma),
            riemann=to_float(riem),
            ricci=to_float(ric),
            scalar=float(scal),
        )


def nijenhuis(jfield: Callable, x, h, dps: int | None = None):
    """Nijenhuis tensor ``N[c, a, b]`` of an endomorphism field on coordinate fields.

    ``jfield(x)[c, a]`` is the component ``(J d_a)^c``.  For coordinate vector
    fields the brackets reduce to derivatives of J:

        N(d_a, d_b) = [J d_a, J d_b] - J[J d_a, d_b] - J[d_a, J d_b]
    """
    with workprec(dps):
        xw = as_working(x, dps)
        hw = h if dps is None else mpmath.mpf(h)
        j = np.asarray(jfield(xw))
        dj = gradient(jfield, xw, hw)  # dj[m, c, a] = d_m J^c_a
        t1 = np.einsum("da,dcb->cab", j, dj)
        t2 = np.einsum("db,dca->cab", j, dj)
        t3 = np.einsum("ce,aeb->cab", j, dj) - np.einsum("ce,bea->cab", j, dj)
        return to_float(t1 - t2 - t3)


def exterior_derivative_2form(omega: Callable, x, h, dps: int | None = None):
    """``d omega`` as the antisymmetric array ``out[a, b, c]``."""
    with workprec(dps):
        xw = as_working(x, dps)
        hw = h if dps is None else mpmath.mpf(h)
        dw = gradient(omega, xw, hw)  # dw[a, b, c] = d_a omega_bc
        out = dw + np.einsum("bca->abc", dw) + np.einsum("cab->abc", dw)
        return to_float(out)
