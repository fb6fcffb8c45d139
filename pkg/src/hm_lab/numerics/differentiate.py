"""Central finite differences with one level of Richardson extrapolation.

Every stencil is evaluated at steps ``h`` and ``h/2`` and combined as
``(4 D(h/2) - D(h)) / 3`` which cancels the O(h^2) term of the central
formulas.  The functions are agnostic of the scalar type: with ``x`` an
object array of ``mpmath.mpf`` the whole computation runs in the current
mpmath precision.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = ["richardson", "derivative", "gradient", "jet"]


def richardson(coarse, fine, order: int = 2, ratio: int = 2):
    """Combine estimates at steps h and h/ratio whose error is O(h**order)."""
    w = ratio**order
    return (w * fine - coarse) / (w - 1)


def _shifted(x, i: int, d):
    y = x.copy()
    y[i] = y[i] + d
    return y


def derivative(f: Callable, x, h):
    """First derivative of a univariate function (scalar or array valued)."""

    def central(step):
        return (f(x + step) - f(x - step)) / (2 * step)

    return richardson(central(h), central(h / 2))


def gradient(f: Callable, x, h):
    """Partial derivatives ``out[i] = d f / d x_i`` of an array-valued ``f``."""
    x = np.asarray(x)
    parts = []
    for i in range(x.shape[0]):

        def central(step, i=i):
            return (f(_shifted(x, i, step)) - f(_shifted(x, i, -step))) / (2 * step)

        parts.append(richardson(central(h), central(h / 2)))
    return np.stack([np.asarray(p) for p in parts])


def jet(f: Callable, x, h):
    """Value, gradient and Hessian of ``f`` at ``x``.

    Returns ``(f0, d, dd)`` with ``d[i] = d_i f`` and ``dd[i, j] = d_i d_j f``.
    Mixed partials use the four-point cross stencil.
    """
    x = np.asarray(x)
    dim = x.shape[0]
    f0 = np.asarray(f(x))
    cache: dict = {}

    def at(offsets):
        key = tuple(offsets)
        if key not in cache:
            y = x.copy()
            for i, d in offsets:
                y[i] = y[i] + d
            cache[key] = np.asarray(f(y))
        return cache[key]

    d = np.empty((dim,) + f0.shape, dtype=f0.dtype if f0.dtype == object else float)
    dd = np.empty((dim, dim) + f0.shape, dtype=d.dtype)
    for i in range(dim):

        def first(s, i=i):
            return (at([(i, s)]) - at([(i, -s)])) / (2 * s)

        def second(s, i=i):
            return (at([(i, s)]) - 2 * f0 + at([(i, -s)])) / (s * s)

        d[i] = richardson(first(h), first(h / 2))
        dd[i, i] = richardson(second(h), second(h / 2))
    for i in range(dim):
        for j in range(i + 1, dim):

            def mixed(s, i=i, j=j):
                return (
                    at([(i, s), (j, s)])
                    - at([(i, s), (j, -s)])
                    - at([(i, -s), (j, s)])
                    + at([(i, -s), (j, -s)])
                ) / (4 * s * s)

            dd[i, j] = dd[j, i] = richardson(mixed(h), mixed(h / 2))
    return f0, d, dd
