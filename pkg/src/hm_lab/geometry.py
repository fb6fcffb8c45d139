"""The metric g = dr^2/V + V dphi^2 + r^2 sum dtheta_i^2 and its curvature.

Coordinates are ordered (r, phi, theta_1, ..., theta_{n-2}) everywhere.  The
radial profile is

    V(r) = (r^2 / ell^2) (1 + a r^(1-n) - r0^n r^(-n)),

whose scalar curvature is S = -n(n-1)/ell^2 for every a and r0.

Closed forms are evaluated in mpmath because the a- and r0-terms of V can
exceed the r^2 term by many orders of magnitude when r_plus is small; the
curvature identities cancel those terms exactly, so double precision would
lose every significant digit there.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import mpmath
import numpy as np

from .errors import DomainError, OutOfChartError, StepTooLargeError
from .numerics.tensors import metric_curvature, workprec

__all__ = [
    "SolitonParams",
    "ChartPoint",
    "Source",
    "CurvatureBundle",
    "RadialProfile",
    "TOL_FD",
    "TOL_CLOSED",
    "eval_profile",
    "profile_terms",
    "cancellation_factor",
    "closed_form_dps",
    "fd_precision",
    "metric_components",
    "christoffels_closed",
    "ricci_closed",
    "curvature_numeric",
    "default_step",
]

TOL_FD = 1e-6
TOL_CLOSED = 1e-12
FD_DOUBLE_LIMIT = 10.0  # cancellation factor above which finite differences run in mpmath


@dataclass(frozen=True)
class SolitonParams:
    """One member of the family.

    ``r0 = 0`` is accepted: with ``a = 0`` it is the hyperbolic reference
    metric, which has no r_plus.  ``lambdas`` are the periods of the theta
    coordinates and default to 2*pi each.
    """

    n: int
    ell: float = 1.0
    a: float = 0.0
    r0: float = 1.0
    lambdas: tuple[float, ...] | None = None
    G: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise DomainError(f"n must be an integer >= 3, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        for name in ("ell", "G"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive, got {v}")
        if not (math.isfinite(self.r0) and self.r0 >= 0):
            raise DomainError(f"r0 must be >= 0, got {self.r0}")
        if not math.isfinite(self.a):
            raise DomainError(f"a must be finite, got {self.a}")
        lambdas = self.lambdas
        if lambdas is None:
            lambdas = (2 * math.pi,) * (self.n - 2)
        lambdas = tuple(float(x) for x in lambdas)
        if len(lambdas) != self.n - 2:
            raise DomainError(f"need {self.n - 2} theta periods, got {len(lambdas)}")
        if any(not (math.isfinite(x) and x > 0) for x in lambdas):
            raise DomainError("theta periods must be positive")
        object.__setattr__(self, "lambdas", lambdas)
        for name in ("ell", "a", "r0", "G"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_scalar_curvature(cls, n: int, S: float, **kw) -> "SolitonParams":
        if not S < 0:
            raise DomainError("scalar curvature must be negative")
        return cls(n=n, ell=math.sqrt(-n * (n - 1) / S), **kw)

    @property
    def S(self) -> float:
        return -self.n * (self.n - 1) / self.ell**2

    @property
    def Lambda(self) -> float:
        return 0.5 * self.S

    @property
    def b(self) -> float:
        return -self.r0**self.n

    @property
    def lam(self) -> float:
        """Volume of the theta torus."""
        return math.prod(self.lambdas)

    def replace(self, **changes) -> "SolitonParams":
        if "n" in changes and "lambdas" not in changes and changes["n"] != self.n:
            changes["lambdas"] = None
        return replace(self, **changes)


@dataclass(frozen=True)
class ChartPoint:
    r: float
    phi: float = 0.0
    thetas: tuple[float, ...] = ()

    @classmethod
    def at(cls, params: SolitonParams, r: float, phi: float = 0.0) -> "ChartPoint":
        return cls(r=r, phi=phi, thetas=(0.0,) * (params.n - 2))

    def coords(self) -> np.ndarray:
        return np.array([self.r, self.phi, *self.thetas], dtype=float)


class Source(enum.Enum):
    CLOSED_FORM = "closed_form"
    NUMERIC = "numeric"


@dataclass(frozen=True, eq=False)
class CurvatureBundle:
    christoffels: dict
    ricci_diag: tuple
    scalar: float
    source: Source
    gamma: np.ndarray = field(repr=False)
    ricci: np.ndarray = field(repr=False)


def profile_terms(params: SolitonParams, r):
    """V, V', V'' at ``r`` in the arithmetic of ``r`` (float or mpf)."""
    n = params.n
    if isinstance(r, mpmath.mpf):
        ell, a, r0 = mpmath.mpf(params.ell), mpmath.mpf(params.a), mpmath.mpf(params.r0)
    else:
        ell, a, r0 = params.ell, params.a, params.r0
    ell2 = ell * ell
    c = r0**n
    v = (r * r + a * r ** (3 - n) - c * r ** (2 - n)) / ell2
    v1 = (2 * r + (3 - n) * a * r ** (2 - n) - (2 - n) * c * r ** (1 - n)) / ell2
    v2 = (2 + (3 - n) * (2 - n) * a * r ** (1 - n) - (2 - n) * (1 - n) * c * r ** (-n)) / ell2
    return v, v1, v2


def eval_profile(params: SolitonParams, r: float) -> tuple[float, float, float]:
    """(V, V', V'') at ``r`` in double precision."""
    if not r > 0:
        raise DomainError(f"profile needs r > 0, got {r}")
    v, v1, v2 = profile_terms(params, float(r))
    return float(v), float(v1), float(v2)


@dataclass(frozen=True)
class RadialProfile:
    params: SolitonParams

    def __call__(self, r: float) -> tuple[float, float, float]:
        return eval_profile(self.params, r)

    @property
    def label(self) -> str:
        p = self.params
        kind = "Horowitz-Myers" if p.a == 0 else "deformed"
        return f"{kind} n={p.n} ell={p.ell:g} a={p.a:g} r0={p.r0:g}"


def cancellation_factor(params: SolitonParams, r: float) -> float:
    """Amplification of rounding in curvature built from V ell^2 / r^2 = 1 + u - w.

    |u| and w measure cancellation in curvature sums, to which u and w
    contribute nothing.  Near a root of V the ratio q = (largest term) / |1 + u - w|
    blows up; Christoffel symbols grow like V'/V and their products like q^2,
    which then cancel down to the bounded curvature.
    """
    n = params.n
    u, w = params.a * r ** (1 - n), (params.r0 / r) ** n
    total = abs(1.0 + u - w)
    biggest = max(1.0, abs(u), w)
    return math.inf if total == 0.0 else max(biggest, (biggest / total) ** 2)


def closed_form_dps(params: SolitonParams, r: float) -> int:
    # at a root itself the factor is unbounded; 20 extra digits cover any double input
    return 30 + int(math.ceil(math.log10(min(cancellation_factor(params, r), 1e20))))


def fd_precision(params: SolitonParams, r: float) -> int | None:
    """mpmath digits for finite differences at ``r``, or None when doubles suffice."""
    cond = cancellation_factor(params, r)
    return None if cond <= FD_DOUBLE_LIMIT else closed_form_dps(params, r)


def metric_components(params: SolitonParams, x):
    """Matrix g_ij at coordinates ``x``; float or mpf arithmetic follows ``x``."""
    n = params.n
    r = x[0]
    v, _, _ = profile_terms(params, r)
    g = np.zeros((n, n), dtype=object if isinstance(r, mpmath.mpf) else float)
    g[0, 0] = 1 / v
    g[1, 1] = v
    for i in range(2, n):
        g[i, i] = r * r
    return g


def _require_chart(params: SolitonParams, r: float) -> float:
    from .soliton import chart_edge

    edge = chart_edge(params)
    if not r > edge:
        raise OutOfChartError(f"r = {r} is not in the chart r > r_plus = {edge}")
    return edge


def _closed_profile(params: SolitonParams, r: float):
    return profile_terms(params, mpmath.mpf(r))


def christoffels_closed(params: SolitonParams, point: ChartPoint) -> dict:
    """Nonzero Christoffel symbols ``{(i, j, k): Gamma^i_{jk}}`` of the warped product."""
    return _christoffels_closed(params, point)[0]


def _christoffels_closed(params: SolitonParams, point: ChartPoint):
    r = point.r
    _require_chart(params, r)
    n = params.n
    with workprec(closed_form_dps(params, r)):
        v, v1, _ = _closed_profile(params, r)
        rr = mpmath.mpf(r)
        entries = {
            (0, 0, 0): -v1 / (2 * v),
            (1, 0, 1): v1 / (2 * v),
            (1, 1, 0): v1 / (2 * v),
            (0, 1, 1): -v * v1 / 2,
        }
        for i in range(2, n):
            entries[(i, 0, i)] = 1 / rr
            entries[(i, i, 0)] = 1 / rr
            entries[(0, i, i)] = -rr * v
        out = {k: float(val) for k, val in entries.items()}
    gamma = np.zeros((n, n, n))
    for (i, j, k), val in out.items():
        gamma[i, j, k] = val
    return out, gamma


def ricci_closed(params: SolitonParams, point: ChartPoint) -> CurvatureBundle:
    """Diagonal Ricci tensor and scalar curvature from V, V', V''."""
    christ, gamma = _christoffels_closed(params, point)
    r = point.r
    n = params.n
    with workprec(closed_form_dps(params, r)):
        v, v1, v2 = _closed_profile(params, r)
        rr = mpmath.mpf(r)
        radial = v2 + (n - 2) * v1 / rr
        ric_r = -radial / (2 * v)
        ric_phi = -radial * v / 2
        ric_theta = -rr * v1 - (n - 3) * v
        scal = -v2 - 2 * (n - 2) * v1 / rr - (n - 2) * (n - 3) * v / rr**2
        diag = (float(ric_r), float(ric_phi)) + (float(ric_theta),) * (n - 2)
        scalar = float(scal)
    return CurvatureBundle(
        christoffels=christ,
        ricci_diag=diag,
        scalar=scalar,
        source=Source.CLOSED_FORM,
        gamma=gamma,
        ricci=np.diag(diag),
    )


def default_step(params: SolitonParams, r: float) -> float:
    """Step 4e-3*d with d the distance to the nearest singularity (r_plus or 0).

    Balances the O((h/d)^4) Richardson error of the second differences
    against their O(eps/h^2) rounding error.
    """
    from .soliton import chart_edge

    return 4e-3 * min(r - chart_edge(params), r)


def curvature_numeric(
    params: SolitonParams,
    point: ChartPoint,
    h: float | None = None,
    dps: int | None | str = "auto",
) -> CurvatureBundle:
    """Curvature from finite differences of the metric components alone.

    ``dps="auto"`` switches to mpmath when the profile's cancellation factor
    exceeds FD_DOUBLE_LIMIT; pass an int to force a precision or None for plain floats.
    """
    from .soliton import chart_edge

    r = point.r
    edge = _require_chart(params, r)
    if dps == "auto":
        dps = fd_precision(params, r)
    if h is None:
        d = min(r - edge, r)
        h = default_step(params, r) if dps is None else 1e-6 * d
    if r - edge <= 2 * h or r <= 2 * h:
        raise StepTooLargeError(
            f"step h = {h:g} too large at r = {r:g}: the stencil reaches r_plus = {chart_edge(params):g}"
        )
    mc = metric_curvature(lambda x: metric_components(params, x), point.coords(), h, dps=dps)
    gamma = mc.christoffel
    christ = {
        (i, j, k): float(gamma[i, j, k])
        for i, j, k in np.ndindex(gamma.shape)
        if gamma[i, j, k] != 0.0
    }
    return CurvatureBundle(
        christoffels=christ,
        ricci_diag=tuple(float(x) for x in np.diag(mc.ricci)),
        scalar=mc.scalar,
        source=Source.NUMERIC,
        gamma=gamma,
        ricci=mc.ricci,
    )
