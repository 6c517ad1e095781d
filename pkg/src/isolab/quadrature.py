"""
Quadrature engine.

Smooth panels go to adaptive Gauss-Kronrod (QUADPACK through scipy); panels
touching a flagged endpoint singularity use a double-exponential (tanh-sinh)
rule whose abscissae are generated as distances from the endpoint, so the
clustering survives floating point near a nonzero endpoint as long as the
integrand itself can be evaluated there.
"""

from __future__ import annotations

import math
import warnings
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _spi

from .errors import QuadratureError

DEFAULT_TOL = 1e-10

_HALF_PI = 0.5 * math.pi
_T_MAX = 4.5


def _as_vector_fn(fn: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def call(x):
        try:
            y = np.asarray(fn(x), dtype=float)
            if y.shape == x.shape:
                return y
        except (TypeError, ValueError):
            pass
        return np.array([float(fn(float(xi))) for xi in x])

    return call


@lru_cache(maxsize=32)
def _tanh_sinh_nodes(level: int):
    """Abscissae on [-1, 1] as (sign, distance-to-nearest-end, weight)."""
    h = 2.0 ** (-level)
    k = np.arange(-int(math.ceil(_T_MAX / h)), int(math.ceil(_T_MAX / h)) + 1)
    t = k * h
    y = _HALF_PI * np.sinh(t)
    # 1 - tanh|y| without cancellation
    dist = 2.0 / (1.0 + np.exp(2.0 * np.abs(y)))
    w = h * _HALF_PI * np.cosh(t) / np.cosh(y) ** 2
    sign = np.sign(t)
    keep = w > 0.0
    return sign[keep], dist[keep], w[keep]


def tanh_sinh(
    fn: Callable,
    lo: float,
    hi: float,
    tol: float = DEFAULT_TOL,
    min_level: int = 3,
    max_level: int = 12,
) -> float:
    """
    Double-exponential quadrature of ``fn`` over ``[lo, hi]``.

    Nodes that round onto an endpoint are dropped; the rule never evaluates
    ``fn`` at ``lo`` or ``hi`` themselves.
    """
    f = _as_vector_fn(fn)
    half = 0.5 * (hi - lo)
    prev = None
    for level in range(max_level + 1):
        sign, dist, w = _tanh_sinh_nodes(level)
        # sign < 0: near lo, x = lo + half*dist; sign > 0: near hi; t = 0: midpoint
        x = np.where(sign < 0, lo + half * dist, np.where(sign > 0, hi - half * dist, lo + half))
        inside = (x > lo) & (x < hi)
        vals = f(x[inside])
        if not np.all(np.isfinite(vals)):
            bad = x[inside][~np.isfinite(vals)][0]
            raise QuadratureError(f"integrand not finite at x={bad!r}", (lo, hi))
        est = half * float(np.dot(w[inside], vals))
        if prev is not None and level >= min_level:
            if abs(est - prev) <= tol * max(abs(est), 1e-300) or abs(est - prev) <= tol * 1e-3:
                return est
        prev = est
    raise QuadratureError("tanh-sinh did not converge", (lo, hi))


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Cached Gauss-Legendre nodes/weights on [0, 1]."""
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = (0.5 * (x + 1.0), 0.5 * w)
    return _GL_CACHE[n]


def gauss_panels(fn: Callable, lo, hi, n: int = 16) -> np.ndarray:
    """
    Fixed-order Gauss-Legendre integral over each panel ``[lo[i], hi[i]]``.

    ``fn`` receives a 2-D array of shape (panels, n) and must be vectorised.
    Meant for panels on which the integrand is smooth and well resolved.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    x, w = gauss_legendre(n)
    width = hi - lo
    pts = lo[..., None] + width[..., None] * x
    return width * (fn(pts) @ w)


def _quad_panel(fn, lo, hi, tol):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        val, err, info = _spi.quad(fn, lo, hi, epsabs=tol * 1e-2, epsrel=tol, limit=200, full_output=1)[:3]
    if not math.isfinite(val):
        raise QuadratureError("integrand produced a non-finite value", (lo, hi))
    if err > max(tol * abs(val), tol) * 10.0:
        raise QuadratureError(f"Gauss-Kronrod error estimate {err:.3g} above tolerance", (lo, hi))
    return val


def integrate(
    fn: Callable,
    a: float,
    b: float,
    singular_ends: tuple[bool, bool] = (False, False),
    tol: float = DEFAULT_TOL,
    breaks: Sequence[float] = (),
) -> float:
    """
    Integrate ``fn`` over ``[a, b]``.

    Parameters
    ----------
    fn : callable
        Integrand, finite on the open interval.  Vectorised callables are
        used as such; scalar ones are mapped.
    a, b : float
        Limits with ``a < b``.
    singular_ends : (bool, bool)
        Flags an integrable power-type singularity at ``a`` and/or ``b``.
    tol : float
        Relative tolerance.
    breaks : sequence of float
        Interior points where the integrand is not smooth; panels are split
        there.

    Raises
    ------
    QuadratureError
        On non-convergence or a non-finite integrand value.
    """
    if not b > a:
        raise ValueError(f"need a < b, got a={a!r}, b={b!r}")
    edges = [a] + sorted(x for x in set(breaks) if a < x < b) + [b]
    total = 0.0
    last = len(edges) - 2
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        sing = (i == 0 and singular_ends[0]) or (i == last and singular_ends[1])
        if sing:
            total += tanh_sinh(fn, lo, hi, tol=tol)
        else:
            total += _quad_panel(lambda t: float(np.asarray(fn(t))), lo, hi, tol)
    return total
