"""
Radial log-convex densities, monotone coefficients and their radial kernels.

A density is ``f(x) = exp(h(|x|))`` with ``h`` convex and nondecreasing on
``[0, inf)``.  The one-sided slopes of ``h`` form the coefficient ``rho``;
a standalone :class:`RhoFunction` carries the same information on a bounded
interval, normalised by ``h(a) = 0``.

:class:`RadialKernel` tabulates ``g(x) = x f(x)`` and its cumulative integral
``G`` so that ``G``, ``G^{-1}`` and ``J = g o G^{-1}`` can be evaluated
quickly on whole arrays.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ConstructionError, DomainError, QuadratureError, SpecParseError
from .quadrature import DEFAULT_TOL, gauss_legendre

FAMILIES = ("constant", "linear", "power", "piecewise-linear")
SIDES = ("left", "right", "mean")


def _check_side(side):
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")


@dataclass(frozen=True)
class Density:
    """
    Radial density ``exp(h(|x|))`` from one of four families.

    ``params`` by family:

    * constant: ``(c,)`` -- ``h = c``; ``h0`` is ignored unless it disagrees.
    * linear: ``(c,)`` -- ``h(t) = h0 + c t`` with ``c >= 0``.
    * power: ``(c, p)`` -- ``h(t) = h0 + c t**p`` with ``c >= 0, p >= 1``.
    * piecewise-linear: ``(s0, t1, s1, t2, s2, ...)`` -- slope ``s0`` on
      ``[0, t1]``, ``s1`` on ``[t1, t2]`` and so on, with
      ``0 < t1 < t2 < ...`` and ``0 <= s0 <= s1 <= ...``.
    """

    family: str
    params: tuple = ()
    h0: float = 0.0
    _knots: np.ndarray = field(init=False, repr=False, compare=False)
    _slopes: np.ndarray = field(init=False, repr=False, compare=False)
    _hknots: np.ndarray = field(init=False, repr=False, compare=False)
    _edges: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "h0", float(self.h0))
        fam = self.family
        if fam not in FAMILIES:
            raise ConstructionError(f"unknown family {fam!r}; expected one of {FAMILIES}")
        if not all(math.isfinite(p) for p in params) or not math.isfinite(self.h0):
            raise ConstructionError("density parameters must be finite")
        knots = np.zeros(0)
        slopes = np.zeros(1)
        if fam == "constant":
            if len(params) > 1:
                raise ConstructionError("constant family takes params (c,)")
            if params:
                object.__setattr__(self, "h0", params[0])
        elif fam == "linear":
            if len(params) != 1:
                raise ConstructionError("linear family takes params (c,)")
            if params[0] < 0:
                raise ConstructionError("linear slope must be >= 0 (h nondecreasing)")
            slopes = np.array([params[0]])
        elif fam == "power":
            if len(params) != 2:
                raise ConstructionError("power family takes params (c, p)")
            c, p = params
            if c < 0:
                raise ConstructionError("power coefficient c must be >= 0")
            if p < 1:
                raise ConstructionError("power exponent p must be >= 1 (h convex)")
        else:
            if len(params) % 2 != 1:
                raise ConstructionError("piecewise-linear params are (s0, t1, s1, ..., tk, sk)")
            slopes = np.array(params[0::2])
            knots = np.array(params[1::2])
            if np.any(slopes < 0):
                raise ConstructionError("piecewise-linear slopes must be >= 0")
            if np.any(np.diff(slopes) < 0):
                raise ConstructionError("piecewise-linear slopes must be nondecreasing (h convex)")
            if knots.size and (knots[0] <= 0 or np.any(np.diff(knots) <= 0)):
                raise ConstructionError("breakpoints must satisfy 0 < t1 < t2 < ...")
        edges = np.concatenate([[0.0], knots])
        hk = np.concatenate([[0.0], np.cumsum(slopes[:-1] * np.diff(edges))]) if knots.size else np.zeros(1)
        object.__setattr__(self, "_knots", knots)
        object.__setattr__(self, "_slopes", slopes)
        object.__setattr__(self, "_hknots", hk)
        object.__setattr__(self, "_edges", edges)

    # -- profile ---------------------------------------------------------
    def h(self, x):
        x = np.asarray(x, dtype=float)
        fam = self.family
        if fam == "constant":
            return np.full_like(x, self.h0)
        if fam == "linear":
            return self.h0 + self.params[0] * x
        if fam == "power":
            c, p = self.params
            return self.h0 + c * np.abs(x) ** p
        edges = self._edges
        k = np.maximum(np.searchsorted(edges, x, side="right") - 1, 0)
        return self.h0 + self._hknots[k] + self._slopes[k] * (x - edges[k])

    def rho(self, x, side="right"):
        _check_side(side)
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("radius must be >= 0")
        if side != "right" and np.any(x == 0):
            raise DomainError("left limit of rho is undefined at x = 0")
        fam = self.family
        if fam == "constant":
            return np.zeros_like(x)
        if fam == "linear":
            return np.full_like(x, self.params[0])
        if fam == "power":
            c, p = self.params
            return c * p * x ** (p - 1.0) if p != 1.0 else np.full_like(x, c)
        edges = self._edges
        right = self._slopes[np.clip(np.searchsorted(edges, x, side="right") - 1, 0, None)]
        if side == "right":
            return right
        left = self._slopes[np.clip(np.searchsorted(edges, x, side="left") - 1, 0, None)]
        return left if side == "left" else 0.5 * (left + right)

    def breaks(self, lo=0.0, hi=math.inf):
        return [float(t) for t in self._knots if lo < t < hi]

    @property
    def plateau_radius(self):
        """``R = inf{rho > 0}``, or ``None`` when rho vanishes identically."""
        fam = self.family
        if fam == "constant":
            return None
        if fam in ("linear", "power"):
            return 0.0 if self.params[0] > 0 else None
        edges = np.concatenate([[0.0], self._knots])
        pos = np.nonzero(self._slopes > 0)[0]
        return float(edges[pos[0]]) if pos.size else None

    def to_record(self):
        return {"family": self.family, "params": list(self.params), "h0": self.h0}


@dataclass(frozen=True)
class RhoFunction:
    """
    Nonnegative nondecreasing bounded coefficient on ``[a, b]``.

    ``kind``/``levels``:

    * ``constant``: ``(c,)``
    * ``affine``: ``(c0, slope)`` meaning ``c0 + slope (x - a)``
    * ``step``: ``(l0, ..., lk)`` with ``jumps = (x1, ..., xk)``; the value
      is ``l_i`` on ``(x_i, x_{i+1})``.
    """

    a: float
    b: float
    kind: str = "constant"
    levels: tuple = (0.0,)
    jumps: tuple = ()

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        levels = tuple(float(v) for v in self.levels)
        jumps = tuple(float(v) for v in self.jumps)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "jumps", jumps)
        if not (0.0 <= a < b) or not math.isfinite(b):
            raise ConstructionError(f"need 0 <= a < b < inf, got [{a!r}, {b!r}]")
        if not all(math.isfinite(v) for v in levels + jumps):
            raise ConstructionError("levels and jumps must be finite")
        if self.kind == "constant":
            if len(levels) != 1 or levels[0] < 0 or jumps:
                raise ConstructionError("constant rho takes one level >= 0")
        elif self.kind == "affine":
            if len(levels) != 2 or levels[0] < 0 or levels[1] < 0 or jumps:
                raise ConstructionError("affine rho takes (c0 >= 0, slope >= 0)")
        elif self.kind == "step":
            if len(levels) != len(jumps) + 1:
                raise ConstructionError("step rho needs len(levels) == len(jumps) + 1")
            if any(v < 0 for v in levels) or any(y < x for x, y in zip(levels, levels[1:])):
                raise ConstructionError("step levels must be nonnegative and nondecreasing")
            if any(not (a < x < b) for x in jumps) or any(y <= x for x, y in zip(jumps, jumps[1:])):
                raise ConstructionError("jumps must be strictly increasing inside (a, b)")
        else:
            raise ConstructionError(f"unknown rho kind {self.kind!r}")

    @classmethod
    def constant(cls, a, b, c=0.0):
        return cls(a, b, "constant", (c,))

    @classmethod
    def affine(cls, a, b, c0, slope):
        return cls(a, b, "affine", (c0, slope))

    @classmethod
    def step(cls, a, b, jumps, levels):
        return cls(a, b, "step", tuple(levels), tuple(jumps))

    def _check(self, x, side):
        _check_side(side)
        x = np.asarray(x, dtype=float)
        if np.any(x < self.a) or np.any(x > self.b):
            raise DomainError(f"x outside [{self.a!r}, {self.b!r}]")
        if side != "right" and np.any(x == self.a):
            raise DomainError("left limit requested at the left end of the domain")
        if side != "left" and np.any(x == self.b):
            raise DomainError("right limit requested at the right end of the domain")
        return x

    def rho(self, x, side="right"):
        x = self._check(x, side)
        if self.kind == "constant":
            return np.full_like(x, self.levels[0])
        if self.kind == "affine":
            return self.levels[0] + self.levels[1] * (x - self.a)
        lv = np.array(self.levels)
        j = np.array(self.jumps)
        right = lv[np.searchsorted(j, x, side="right")]
        if side == "right":
            return right
        left = lv[np.searchsorted(j, x, side="left")]
        return left if side == "left" else 0.5 * (left + right)

    def h(self, x):
        x = np.asarray(x, dtype=float)
        d = x - self.a
        if self.kind == "constant":
            return self.levels[0] * d
        if self.kind == "affine":
            return self.levels[0] * d + 0.5 * self.levels[1] * d * d
        edges = np.array((self.a,) + self.jumps)
        lv = np.array(self.levels)
        hk = np.concatenate([[0.0], np.cumsum(lv[:-1] * np.diff(edges))])
        k = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, edges.size - 1)
        return hk[k] + lv[k] * (x - edges[k])

    def breaks(self, lo=-math.inf, hi=math.inf):
        return [x for x in self.jumps if lo < x < hi]

    @property
    def rho_a(self):
        """``rho(a+)``."""
        return float(self.rho(self.a, "right"))

    @property
    def rho_b(self):
        """``rho(b-)``."""
        return float(self.rho(self.b, "left"))

    @property
    def sup(self):
        return self.rho_b

    def to_record(self):
        return {"a": self.a, "b": self.b, "kind": self.kind, "levels": list(self.levels), "jumps": list(self.jumps)}


class Window:
    """A Density or RhoFunction seen on ``[a, b]`` with ``h(a) = 0``."""

    def __init__(self, source, a, b):
        if isinstance(source, Window):
            source = source.source
        a, b = float(a), float(b)
        if not (0.0 <= a < b):
            raise DomainError(f"need 0 <= a < b, got [{a!r}, {b!r}]")
        if isinstance(source, RhoFunction) and (a < source.a or b > source.b):
            raise DomainError(f"[{a!r}, {b!r}] not inside the coefficient domain [{source.a!r}, {source.b!r}]")
        self.source = source
        self.a = a
        self.b = b
        self._shift = float(source.h(a))

    def h(self, x):
        return self.source.h(x) - self._shift

    def rho(self, x, side="right"):
        return self.source.rho(x, side)

    def breaks(self, lo=-math.inf, hi=math.inf):
        return self.source.breaks(max(lo, self.a), min(hi, self.b))

    @property
    def rho_a(self):
        return float(self.source.rho(self.a, "right"))

    @property
    def rho_b(self):
        return float(self.source.rho(self.b, "left"))

    @property
    def sup(self):
        return self.rho_b

    def to_record(self):
        rec = dict(self.source.to_record())
        rec.update(window=[self.a, self.b])
        return rec


def window(source, a, b) -> Window:
    return Window(source, a, b)


def eval_rho(d, x, side="mean"):
    """
    One-sided slope of the profile: ``rho_-(x)``, ``rho_+(x)`` or their mean.

    Works for :class:`Density`, :class:`RhoFunction` and windows of either.
    Returns a float for scalar ``x``.
    """
    val = d.rho(x, side)
    return float(val) if np.ndim(val) == 0 else val


_GL_LO = 16
_GL_HI = 24


class RadialKernel:
    """
    Evaluators for ``f = exp(h)``, ``g = x f``, ``G = int_lo^x g``, ``G^{-1}``
    and ``J = g o G^{-1}`` on ``[lo, hi]``.

    ``G`` is accumulated over a table of sub-panels that never straddle a
    coefficient breakpoint and are refined until two Gauss-Legendre orders
    agree to ``eps``.  Inversion is bracketed Newton/bisection on a single
    sub-panel.
    """

    def __init__(self, source, lo, hi, eps=DEFAULT_TOL):
        lo, hi = float(lo), float(hi)
        if not (0.0 <= lo < hi) or not math.isfinite(hi):
            raise DomainError(f"kernel domain must satisfy 0 <= lo < hi < inf, got [{lo!r}, {hi!r}]")
        if not eps > 0:
            raise ValueError("eps must be positive")
        self.source = source
        self.lo, self.hi, self.eps = lo, hi, float(eps)
        self.breakpoints = tuple(source.breaks(lo, hi))
        self._build()

    # -- construction ----------------------------------------------------
    def _build(self):
        edges = [self.lo, *self.breakpoints, self.hi]
        width_cap = (self.hi - self.lo) / 16.0
        pieces = []
        for p, q in zip(edges[:-1], edges[1:]):
            n = max(1, int(math.ceil((q - p) / width_cap - 1e-9)))
            pieces.extend(np.linspace(p, q, n + 1)[:-1].tolist())
        nodes = np.array(pieces + [self.hi])
        for _ in range(60):
            hv = self.h(nodes)
            if not np.all(np.isfinite(hv)) or np.max(hv) > 700.0:
                raise QuadratureError("exp(h) overflows on the kernel domain", (self.lo, self.hi))
            p, q = nodes[:-1], nodes[1:]
            lo_est = self._gl(p, q, _GL_LO)
            hi_est = self._gl(p, q, _GL_HI)
            scale = np.maximum(np.cumsum(hi_est), np.abs(hi_est))
            bad = (np.abs(hi_est - lo_est) > 1e-3 * self.eps * np.maximum(scale, 1e-300)) | (np.diff(hv) > 0.5)
            if not np.any(bad):
                break
            narrow = bad & ((q - p) < 1e-13 * max(1.0, self.hi))
            if np.any(narrow):
                i = int(np.nonzero(narrow)[0][0])
                raise QuadratureError("cumulative quadrature of g did not converge", (float(p[i]), float(q[i])))
            mids = 0.5 * (p[bad] + q[bad])
            nodes = np.sort(np.concatenate([nodes, mids]))
        else:
            raise QuadratureError("cumulative quadrature of g did not converge", (self.lo, self.hi))
        self._nodes = nodes
        self._cum = np.concatenate([[0.0], np.cumsum(hi_est)])
        self._nodes_list = nodes.tolist()
        self._cum_list = self._cum.tolist()
        # fine table for the scalar inverse: Hermite data (s, x, dx/ds = 1/g)
        sub = np.linspace(0.0, 1.0, 9)[:-1]
        xt = np.concatenate([(nodes[:-1, None] + np.diff(nodes)[:, None] * sub).ravel(), [self.hi]])
        self._tab_x = xt
        self._tab_s = np.asarray(self.G(xt), dtype=float)
        self._tab_g = np.asarray(self.g(xt), dtype=float)
        self._tab_s_list = self._tab_s.tolist()
        self._tab_x_list = xt.tolist()
        self._tab_g_list = self._tab_g.tolist()
        self._gl_t, self._gl_w = gauss_legendre(_GL_HI)
        self._gl_t_col = self._gl_t[None, :]

    def _gl(self, p, q, n):
        x, w = gauss_legendre(n)
        pts = p[:, None] + (q - p)[:, None] * x
        return (q - p) * (self.g(pts) @ w)

    # -- evaluators --------------------------------------------------------
    def h(self, x):
        return self.source.h(x)

    def f(self, x):
        return np.exp(self.h(x))

    def g(self, x):
        x = np.asarray(x, dtype=float)
        return x * np.exp(self.h(x))

    def rho(self, x, side="right"):
        return self.source.rho(x, side)

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        span = 1e-12 * max(1.0, self.hi)
        if np.any(x < self.lo - span) or np.any(x > self.hi + span):
            raise DomainError(f"argument outside kernel domain [{self.lo!r}, {self.hi!r}]")
        return np.clip(x, self.lo, self.hi)

    def _partial(self, k, x):
        """Integral of g from node k to x (same shapes)."""
        start = self._nodes[k]
        t, w = gauss_legendre(_GL_HI)
        pts = start[..., None] + (x - start)[..., None] * t
        return (x - start) * (self.g(pts) @ w)

    def G(self, x):
        x = self._check(x)
        k = np.clip(np.searchsorted(self._nodes, x, side="right") - 1, 0, self._nodes.size - 2)
        out = self._cum[k] + self._partial(k, x)
        return float(out) if out.ndim == 0 else out

    @property
    def G_max(self):
        return float(self._cum[-1])

    def G_inv(self, s):
        s = np.asarray(s, dtype=float)
        scalar = s.ndim == 0
        s = np.atleast_1d(s)
        if np.any(s < 0) or np.any(s > self.G_max * (1 + 1e-14)):
            raise DomainError(f"G^-1 argument outside [0, {self.G_max!r}]")
        k = np.clip(np.searchsorted(self._cum, s, side="right") - 1, 0, self._nodes.size - 2)
        lo_b = self._nodes[k].copy()
        hi_b = self._nodes[k + 1].copy()
        c0, c1 = self._cum[k], self._cum[k + 1]
        frac = np.where(c1 > c0, (s - c0) / np.where(c1 > c0, c1 - c0, 1.0), 0.0)
        x = lo_b + np.clip(frac, 0.0, 1.0) * (hi_b - lo_b)
        xtol = 1e-3 * self.eps * max(1.0, self.hi)
        for _ in range(100):
            r = self._cum[k] + self._partial(k, x) - s
            lo_b = np.where(r < 0, x, lo_b)
            hi_b = np.where(r > 0, x, hi_b)
            gx = self.g(x)
            with np.errstate(divide="ignore", invalid="ignore"):
                xn = x - r / gx
            out = ~np.isfinite(xn) | (xn < lo_b) | (xn > hi_b)
            xn = np.where(out, 0.5 * (lo_b + hi_b), xn)
            xn = np.where(r == 0, x, xn)
            moved = np.abs(xn - x)
            x = xn
            if np.all((moved <= xtol) | (r == 0)):
                break
        return float(x[0]) if scalar else x

    def J(self, s):
        return self.g(self.G_inv(s))

    # -- scalar fast paths (optimizer inner loops) ---------------------------
    def G_fast(self, x: np.ndarray) -> np.ndarray:
        """``G`` on an in-domain 1-D array without argument checks."""
        return self.G_and_g(x)[0]

    def G_and_g(self, x: np.ndarray):
        """``(G(x), g(x))`` on an in-domain 1-D array from one evaluation of ``h``."""
        nodes = self._nodes
        k = np.searchsorted(nodes, x, side="right") - 1
        np.minimum(k, nodes.size - 2, out=k)
        start = nodes[k]
        width = x - start
        n = x.size
        pts = np.empty((n, _GL_HI + 1))
        np.multiply(width[:, None], self._gl_t_col, out=pts[:, :_GL_HI])
        pts[:, :_GL_HI] += start[:, None]
        pts[:, _GL_HI] = x
        gv = pts * np.exp(self.source.h(pts))
        return self._cum[k] + width * (gv[:, :_GL_HI] @ self._gl_w), gv[:, _GL_HI]

    def G_inv_batch(self, s: np.ndarray) -> np.ndarray:
        """
        ``G^{-1}`` on a 1-D array inside ``[0, G_max]`` without argument
        checks: the Hermite guess and Newton stopping rule of
        :meth:`G_inv_scalar`, applied elementwise.
        """
        ts = self._tab_s
        i = np.clip(np.searchsorted(ts, s, side="right") - 1, 0, ts.size - 2)
        s0, s1 = ts[i], ts[i + 1]
        x0, x1 = self._tab_x[i], self._tab_x[i + 1]
        g0, g1 = self._tab_g[i], self._tab_g[i + 1]
        ds = s1 - s0
        q = (s - s0) / ds
        with np.errstate(divide="ignore", invalid="ignore"):
            m0 = np.where(g0 > 0, ds / g0, (x1 - x0) * 2.0)
            m1 = ds / g1
            curv = np.abs(g1 - g0) / ((x1 - x0) * np.maximum(np.minimum(g0, g1), 1e-300))
        r = 1.0 - q
        x = (1 + 2 * q) * r * r * x0 + q * r * r * m0 + q * q * (3 - 2 * q) * x1 + q * q * (q - 1) * m1
        x = np.minimum(np.maximum(x, x0), x1)
        active = np.ones(s.size, dtype=bool)
        for _ in range(8):
            idx = np.nonzero(active)[0]
            if idx.size == 0:
                break
            G, gx = self.G_and_g(x[idx])
            good = gx > 0.0
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(good, (G - s[idx]) / gx, 0.0)
            x[idx] = np.where(good, np.minimum(np.maximum(x[idx] - step, x0[idx]), x1[idx]), x[idx])
            done = ~good | (curv[idx] * step * step <= 1e-16 * np.maximum(x[idx], 1e-300))
            active[idx[done]] = False
        return x

    def G_scalar(self, x: float) -> float:
        nl = self._nodes_list
        k = bisect.bisect_right(nl, x) - 1
        k = min(max(k, 0), len(nl) - 2)
        start = nl[k]
        width = x - start
        pts = start + width * self._gl_t
        return self._cum_list[k] + width * float((pts * np.exp(self.source.h(pts))) @ self._gl_w)

    def g_scalar(self, x: float) -> float:
        return x * math.exp(float(self.source.h(x)))

    def G_inv_scalar(self, s: float) -> float:
        """Hermite-interpolated guess from a fine table, then Newton steps."""
        ts = self._tab_s_list
        if not 0.0 <= s <= self._cum_list[-1] * (1 + 1e-14):
            raise DomainError(f"G^-1 argument outside [0, {self.G_max!r}]")
        i = bisect.bisect_right(ts, s) - 1
        i = min(max(i, 0), len(ts) - 2)
        s0, s1 = ts[i], ts[i + 1]
        x0, x1 = self._tab_x_list[i], self._tab_x_list[i + 1]
        g0, g1 = self._tab_g_list[i], self._tab_g_list[i + 1]
        ds = s1 - s0
        q = (s - s0) / ds
        m0 = ds / g0 if g0 > 0 else (x1 - x0) * 2.0
        m1 = ds / g1
        r = 1.0 - q
        x = (1 + 2 * q) * r * r * x0 + q * r * r * m0 + q * q * (3 - 2 * q) * x1 + q * q * (q - 1) * m1
        x = min(max(x, x0), x1)
        # Newton error after a step is about |g'/2g| step^2
        curv = abs(g1 - g0) / ((x1 - x0) * max(min(g0, g1), 1e-300))
        for _ in range(8):
            gx = self.g_scalar(x)
            if gx <= 0.0:
                break
            step = (self.G_scalar(x) - s) / gx
            xn = min(max(x - step, x0), x1)
            if curv * step * step <= 1e-16 * max(x, 1e-300):
                return xn
            x = xn
        return x


def build_kernel(src, domain=None, eps=DEFAULT_TOL) -> RadialKernel:
    """
    Kernel for a Density (normalised by its own ``h0``) or for a coefficient
    on ``[a, b]`` (normalised by ``h(a) = 0``).

    ``domain`` defaults to ``[a, b]`` for coefficients; it is required for a
    Density.
    """
    if isinstance(src, (RhoFunction, Window)):
        a, b = (src.a, src.b) if domain is None else domain
        return RadialKernel(Window(src, a, b), a, b, eps)
    if domain is None:
        raise ValueError("a Density kernel needs an explicit domain (lo, hi)")
    return RadialKernel(src, domain[0], domain[1], eps)


def kernel_covering(d: Density, G_target: float, eps=DEFAULT_TOL, start=2.0) -> RadialKernel:
    """Kernel on ``[0, hi]`` with ``G(hi) >= G_target``, doubling ``hi``."""
    hi = start
    for _ in range(60):
        k = RadialKernel(d, 0.0, hi, eps)
        if k.G_max >= G_target:
            return k
        hi *= 1.5
    raise DomainError(f"could not cover G = {G_target!r}")


# -- density files ---------------------------------------------------------

_KEYS = ("family", "params", "h0")


def _parse_value(raw, lineno, key):
    raw = raw.strip()
    if key == "family":
        val = raw.strip("'\"")
        if val not in FAMILIES:
            raise SpecParseError(f"unknown family {val!r}", lineno, key)
        return val
    if key == "params":
        txt = raw if raw.startswith("[") else f"[{raw}]"
        try:
            vals = json.loads(txt)
        except json.JSONDecodeError as exc:
            raise SpecParseError(f"malformed array ({exc.msg})", lineno, key) from None
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
            raise SpecParseError("params must be numbers", lineno, key)
        return tuple(float(v) for v in vals)
    try:
        return float(raw)
    except ValueError:
        raise SpecParseError(f"malformed number {raw!r}", lineno, key) from None


def parse_density_text(text: str) -> Density:
    """
    Parse ``key = value`` lines (``#`` comments) with keys ``family``,
    ``params`` (array) and ``h0``.
    """
    seen: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecParseError("expected 'key = value'", lineno)
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise SpecParseError("unknown key", lineno, key)
        if key in seen:
            raise SpecParseError("duplicate key", lineno, key)
        seen[key] = (_parse_value(raw, lineno, key), lineno)
    if "family" not in seen:
        raise SpecParseError("missing required key", key="family")
    family = seen["family"][0]
    params = seen.get("params", ((),))[0]
    h0 = seen.get("h0", (0.0,))[0]
    if family == "constant" and "h0" in seen and params and params[0] != h0:
        raise SpecParseError("constant level and h0 disagree", seen["h0"][1], "h0")
    try:
        return Density(family, params, h0)
    except ConstructionError as exc:
        raise SpecParseError(str(exc), seen.get("params", (None, None))[1], "params") from None


def load_density(path) -> Density:
    with open(path, encoding="utf-8") as fh:
        return parse_density_text(fh.read())


def format_density(d: Density) -> str:
    params = ", ".join(f"{p:.15g}" for p in d.params)
    return f"family = {d.family}\nparams = [{params}]\nh0 = {d.h0:.15g}\n"


def iter_sides() -> Iterable[str]:
    return iter(SIDES)
