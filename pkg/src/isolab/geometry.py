"""
Weighted volume and perimeter of planar shapes under a radial density,
spherical cap symmetrization and boundary-curve kinematics.

A cap-symmetric set is described by its angular half-width ``theta2(tau)``:
the ring of radius ``tau`` meets the set in the arc ``|theta| < theta2(tau)``.
Its upper boundary ``gamma(tau) = tau (cos theta2, sin theta2)`` is
traversed with ``tau`` decreasing, which is the counter-clockwise
orientation.  Along it ``u = sin(sigma) = -tau theta2' / sqrt(1 + (tau theta2')^2)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .density import Density, RadialKernel
from .errors import DomainError, OverlapError, QuadratureError, SpecParseError
from .quadrature import integrate

TWO_PI = 2.0 * math.pi
_QTOL = 1e-12


# -- shape components ----------------------------------------------------------


@dataclass(frozen=True)
class CapProfile:
    """
    Piecewise-linear angular half-width on nodes ``tau``.

    ``theta_left[i]`` and ``theta_right[i]`` are the one-sided values at
    ``tau[i]``; between nodes ``theta2`` interpolates linearly from
    ``theta_right[i]`` to ``theta_left[i+1]``.  The set is empty outside
    ``[tau[0], tau[-1]]``, so ``theta_left[0]`` and ``theta_right[-1]`` are
    forced to zero.
    """

    tau: np.ndarray
    theta_left: np.ndarray
    theta_right: np.ndarray

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        tl = np.asarray(self.theta_left, dtype=float).copy()
        tr = np.asarray(self.theta_right, dtype=float).copy()
        if tau.ndim != 1 or tau.size < 2 or tl.shape != tau.shape or tr.shape != tau.shape:
            raise DomainError("cap profile needs matching 1-D arrays with at least two nodes")
        if tau[0] < 0 or np.any(np.diff(tau) <= 0):
            raise DomainError("cap profile radii must be >= 0 and strictly increasing")
        if not (np.all(np.isfinite(tl)) and np.all(np.isfinite(tr))):
            raise DomainError("cap profile angles must be finite")
        tl[0] = 0.0
        tr[-1] = 0.0
        if np.any(tl < -1e-15) or np.any(tr < -1e-15) or np.any(tl > math.pi + 1e-15) or np.any(tr > math.pi + 1e-15):
            raise DomainError("cap profile angles must lie in [0, pi]")
        for name, val in (("tau", tau), ("theta_left", np.clip(tl, 0, math.pi)), ("theta_right", np.clip(tr, 0, math.pi))):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @classmethod
    def from_nodes(cls, tau, theta):
        """Continuous profile through ``(tau, theta)``; the ends close with arcs."""
        theta = np.asarray(theta, dtype=float)
        return cls(tau, theta, theta)

    @property
    def jumps(self):
        """Nodes where the one-sided values differ, with ``(left, right)``."""
        d = np.abs(self.theta_right - self.theta_left)
        idx = np.nonzero(d > 0)[0]
        return [(float(self.tau[i]), float(self.theta_left[i]), float(self.theta_right[i])) for i in idx]

    def __call__(self, t, side="right"):
        """``theta2`` at ``t`` (one-sided at nodes)."""
        t = np.asarray(t, dtype=float)
        tau = self.tau
        i = np.clip(np.searchsorted(tau, t, side="right" if side == "right" else "left") - 1, 0, tau.size - 2)
        p, q = tau[i], tau[i + 1]
        s = (t - p) / (q - p)
        val = self.theta_right[i] + s * (self.theta_left[i + 1] - self.theta_right[i])
        out = (t < tau[0]) | (t > tau[-1])
        if side == "right":
            out |= t == tau[-1]
        else:
            out |= t == tau[0]
        return np.where(out, 0.0, val)

    def L(self, t, side="right"):
        """Arc length ``2 t theta2(t)`` of the section at radius ``t``."""
        t = np.asarray(t, dtype=float)
        return 2.0 * t * self(t, side)

    @property
    def support(self):
        pos = np.nonzero((self.theta_left > 0) | (self.theta_right > 0))[0]
        if pos.size == 0:
            return None
        lo = self.tau[max(pos[0], 0)]
        hi = self.tau[min(pos[-1] + 1, self.tau.size - 1)] if self.theta_right[pos[-1]] > 0 else self.tau[pos[-1]]
        return float(lo), float(hi)

    def to_record(self):
        return {"tau": self.tau.tolist(), "theta_left": self.theta_left.tolist(), "theta_right": self.theta_right.tolist()}


@dataclass(frozen=True)
class CenteredBall:
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError("ball radius must be positive")

    @property
    def radial_support(self):
        return (0.0, float(self.r))


@dataclass(frozen=True)
class Annulus:
    a_in: float
    a_out: float

    def __post_init__(self):
        if not (0 <= self.a_in < self.a_out):
            raise DomainError("annulus needs 0 <= a_in < a_out")

    @property
    def radial_support(self):
        return (float(self.a_in), float(self.a_out))


@dataclass(frozen=True)
class OffCenterBall:
    cx: float
    cy: float
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError("ball radius must be positive")

    @property
    def dist(self):
        return math.hypot(self.cx, self.cy)

    @property
    def angle(self):
        return math.atan2(self.cy, self.cx)

    @property
    def radial_support(self):
        d = self.dist
        return (max(d - self.r, 0.0), d + self.r)

    def half_width(self, t):
        """Angular half-width of the ball's section at radius ``t``."""
        t = np.asarray(t, dtype=float)
        d, r = self.dist, self.r
        with np.errstate(divide="ignore", invalid="ignore"):
            c = (t * t + d * d - r * r) / (2.0 * t * d)
        c = np.where(t > 0, c, -np.inf if d < r else np.inf)
        return np.arccos(np.clip(c, -1.0, 1.0))


@dataclass(frozen=True)
class Cap:
    """Cap profile rotated so that its axis points at ``angle``."""

    profile: CapProfile
    angle: float = 0.0

    @property
    def radial_support(self):
        return self.profile.support


COMPONENT_TYPES = (CenteredBall, Annulus, OffCenterBall, Cap)


def _radial(c):
    return isinstance(c, (CenteredBall, Annulus))


def _closed_overlap(s1, s2):
    if s1 is None or s2 is None:
        return False
    return s1[0] <= s2[1] and s2[0] <= s1[1]


def _angular_gap(dphi, w1, w2):
    """Gap between two arcs of half-widths ``w1, w2`` whose axes differ by ``dphi``."""
    d = np.abs((dphi + math.pi) % TWO_PI - math.pi)
    return np.minimum(d, TWO_PI - d) - w1 - w2


def _pair_disjoint(c1, c2, n_sample=2001) -> bool:
    if not _closed_overlap(c1.radial_support, c2.radial_support):
        return True
    if _radial(c1) or _radial(c2):
        return False
    if isinstance(c1, OffCenterBall) and isinstance(c2, OffCenterBall):
        return math.hypot(c1.cx - c2.cx, c1.cy - c2.cy) > c1.r + c2.r
    if isinstance(c1, Cap) and isinstance(c2, Cap):
        t = np.union1d(c1.profile.tau, c2.profile.tau)
        for side in ("left", "right"):
            w1, w2 = c1.profile(t, side), c2.profile(t, side)
            both = (w1 > 0) | (w2 > 0)
            gap = _angular_gap(c1.angle - c2.angle, w1, w2)
            # touching at isolated radii still merges closures
            if np.any(gap[both] <= 0):
                return False
        return True
    cap, ball = (c1, c2) if isinstance(c1, Cap) else (c2, c1)
    lo = max(cap.radial_support[0], ball.radial_support[0])
    hi = min(cap.radial_support[1], ball.radial_support[1])
    t = np.linspace(lo, hi, n_sample)
    gap = _angular_gap(cap.angle - ball.angle, cap.profile(t), ball.half_width(t))
    return bool(np.all(gap > 0))


@dataclass(frozen=True)
class ShapeUnion:
    """Finite union of components; ``disjoint`` is verified pairwise."""

    components: tuple
    disjoint: bool = field(init=False)

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise DomainError("shape union needs at least one component")
        for c in comps:
            if not isinstance(c, COMPONENT_TYPES):
                raise DomainError(f"unsupported component {c!r}")
        object.__setattr__(self, "components", comps)
        ok = all(_pair_disjoint(p, q) for i, p in enumerate(comps) for q in comps[i + 1 :])
        object.__setattr__(self, "disjoint", ok)


def as_union(s) -> ShapeUnion:
    if isinstance(s, ShapeUnion):
        return s
    if isinstance(s, COMPONENT_TYPES):
        return ShapeUnion((s,))
    if isinstance(s, CapProfile):
        return ShapeUnion((Cap(s),))
    return ShapeUnion(tuple(s))


# -- measures -----------------------------------------------------------------


def _f(d, t):
    return np.exp(d.h(np.asarray(t, dtype=float)))


def _g(d, t):
    t = np.asarray(t, dtype=float)
    return t * np.exp(d.h(t))


def _G_between(d, lo, hi):
    if hi <= lo:
        return 0.0
    return integrate(lambda t: _g(d, t), lo, hi, tol=_QTOL, breaks=d.breaks(lo, hi))


def _cap_volume(p: CapProfile, d):
    total = 0.0
    tau = p.tau
    for i in range(tau.size - 1):
        lo, hi = tau[i], tau[i + 1]
        t0, t1 = p.theta_right[i], p.theta_left[i + 1]
        if t0 == 0 and t1 == 0:
            continue
        slope = (t1 - t0) / (hi - lo)

        def fn(t, lo=lo, t0=t0, slope=slope):
            return 2.0 * (t0 + slope * (t - lo)) * _g(d, t)

        total += integrate(fn, lo, hi, tol=_QTOL, breaks=d.breaks(lo, hi))
    return total


def _cap_perimeter(p: CapProfile, d):
    total = 0.0
    tau = p.tau
    for i in range(tau.size - 1):
        lo, hi = tau[i], tau[i + 1]
        t0, t1 = p.theta_right[i], p.theta_left[i + 1]
        if (t0 == 0 and t1 == 0) or (t0 == math.pi and t1 == math.pi):
            continue
        slope = (t1 - t0) / (hi - lo)

        def fn(t, slope=slope):
            return 2.0 * _f(d, t) * np.sqrt(1.0 + (t * slope) ** 2)

        total += integrate(fn, lo, hi, tol=_QTOL, breaks=d.breaks(lo, hi))
    # closing and jump arcs, two symmetric arcs each
    jump = np.abs(p.theta_right - p.theta_left)
    total += float(np.sum(2.0 * tau * jump * _f(d, tau)))
    return total


def _offcenter_volume(b: OffCenterBall, d):
    dist, r = b.dist, b.r
    if dist == 0.0:
        return TWO_PI * _G_between(d, 0.0, r)
    lo, hi = abs(dist - r), dist + r
    total = TWO_PI * _G_between(d, 0.0, r - dist) if dist < r else 0.0

    def fn(t):
        return 2.0 * b.half_width(t) * _g(d, t)

    # the half-width has square-root behaviour at both ends
    inner = dist > r
    total += integrate(fn, lo, hi, singular_ends=(inner, True), tol=_QTOL, breaks=d.breaks(lo, hi))
    return total


def _offcenter_perimeter(b: OffCenterBall, d):
    # circle parameter phi measured from the direction of the centre
    dist, r = b.dist, b.r
    pts = []
    for t in d.breaks(abs(dist - r), dist + r):
        if dist > 0:
            c = (t * t - dist * dist - r * r) / (2.0 * dist * r)
            if -1.0 < c < 1.0:
                pts.append(math.acos(c))

    def fn(phi):
        rad = np.sqrt(dist * dist + r * r + 2.0 * dist * r * np.cos(phi))
        return _f(d, rad) * r

    # symmetric in phi, integrate over [0, pi] and double
    edges = [0.0, *sorted(pts), math.pi]
    total = 0.0
    for p, q in zip(edges[:-1], edges[1:]):
        val, err = quad(fn, p, q, epsabs=0.0, epsrel=_QTOL, limit=200)
        total += val
    return 2.0 * total


def component_volume(c, d) -> float:
    if isinstance(c, CenteredBall):
        return TWO_PI * _G_between(d, 0.0, c.r)
    if isinstance(c, Annulus):
        return TWO_PI * _G_between(d, c.a_in, c.a_out)
    if isinstance(c, OffCenterBall):
        return _offcenter_volume(c, d)
    return _cap_volume(c.profile, d)


def component_perimeter(c, d) -> float:
    if isinstance(c, CenteredBall):
        return float(TWO_PI * _g(d, c.r))
    if isinstance(c, Annulus):
        return float(TWO_PI * (_g(d, c.a_in) + _g(d, c.a_out)))
    if isinstance(c, OffCenterBall):
        return _offcenter_perimeter(c, d)
    return _cap_perimeter(c.profile, d)


def weighted_volume(s, d: Density) -> float:
    """``V_f`` of a disjoint union (radial parts through ``2 pi (G(out) - G(in))``)."""
    u = as_union(s)
    if not u.disjoint:
        raise OverlapError("components overlap; volume of a union is not additive")
    return float(sum(component_volume(c, d) for c in u.components))


def weighted_perimeter(s, d: Density) -> float:
    """``P_f`` of a union whose components have pairwise disjoint closures."""
    u = as_union(s)
    if not u.disjoint:
        raise OverlapError("components are not pairwise disjoint with disjoint closures")
    return float(sum(component_perimeter(c, d) for c in u.components))


# -- symmetrization -------------------------------------------------------------


@dataclass(frozen=True)
class SymmetrizationResult:
    profile: CapProfile
    perimeter_before: float
    perimeter_after: float
    volume_before: float
    volume_after: float
    eps_disc: float

    def L_table(self):
        p = self.profile
        return p.tau, 2.0 * p.tau * p.theta_left, 2.0 * p.tau * p.theta_right


def _sum_profiles(parts: Sequence[CapProfile]) -> CapProfile:
    tau = np.unique(np.concatenate([p.tau for p in parts]))
    tl = np.zeros_like(tau)
    tr = np.zeros_like(tau)
    for p in parts:
        tl += p(tau, "left")
        tr += p(tau, "right")
    if np.any(tl > math.pi + 1e-12) or np.any(tr > math.pi + 1e-12):
        raise DomainError("sections overlap: total angular measure exceeds 2 pi")
    return CapProfile(tau, np.minimum(tl, math.pi), np.minimum(tr, math.pi))


def _ball_profile(b: OffCenterBall, n: int) -> CapProfile:
    dist, r = b.dist, b.r
    lo, hi = abs(dist - r), dist + r
    # cluster nodes at the square-root ends
    s = 0.5 - 0.5 * np.cos(np.linspace(0.0, math.pi, n))
    t = lo + (hi - lo) * s
    th = b.half_width(t)
    if dist < r:
        th[0] = math.pi
        t = np.concatenate([[0.0], t])
        th = np.concatenate([[math.pi], th])
    else:
        th[0] = 0.0
    th[-1] = 0.0
    return CapProfile.from_nodes(t, th)


def _component_profile(c, n_ball):
    if isinstance(c, CenteredBall):
        return CapProfile.from_nodes([0.0, c.r], [math.pi, math.pi])
    if isinstance(c, Annulus):
        return CapProfile.from_nodes([c.a_in, c.a_out], [math.pi, math.pi])
    if isinstance(c, OffCenterBall):
        if c.dist == 0.0:
            return CapProfile.from_nodes([0.0, c.r], [math.pi, math.pi])
        return _ball_profile(c, n_ball)
    return c.profile


def symmetral(s, n_ball=801) -> CapProfile:
    """Cap symmetral of a disjoint union: ``theta2 = L / (2 tau)`` summed over components."""
    u = as_union(s)
    if not u.disjoint:
        raise OverlapError("symmetrization needs disjoint components")
    return _sum_profiles([_component_profile(c, n_ball) for c in u.components])


def symmetrize(s, d: Density, n_ball=801) -> SymmetrizationResult:
    """
    Symmetral with perimeters and volumes before and after.

    Sections of caps, balls and annuli are summed exactly; off-center balls
    are sampled on ``n_ball`` nodes and ``eps_disc`` is estimated from the
    change when the sampling is halved.  For exact inputs ``eps_disc`` is the
    quadrature tolerance scaled by the perimeter.
    """
    if isinstance(s, np.ndarray):
        raise TypeError("use symmetrize_raster for rasterized input")
    u = as_union(s)
    p_before = weighted_perimeter(u, d)
    v_before = weighted_volume(u, d)
    prof = symmetral(u, n_ball)
    p_after = _cap_perimeter(prof, d)
    v_after = _cap_volume(prof, d)
    eps = 1e-9 * max(p_before, v_before, 1.0)
    if any(isinstance(c, OffCenterBall) and c.dist > 0 for c in u.components):
        coarse = symmetral(u, (n_ball + 1) // 2)
        eps += 2.0 * max(abs(_cap_perimeter(coarse, d) - p_after), abs(_cap_volume(coarse, d) - v_after))
    return SymmetrizationResult(prof, p_before, p_after, v_before, v_after, eps)


def raster_contours(mask, cell, origin=None) -> list:
    """Closed marching-squares boundary polygons of a boolean raster, in world coordinates."""
    from skimage.measure import find_contours

    mask = np.asarray(mask, dtype=bool)
    padded = np.pad(mask, 1).astype(float)
    ox, oy = _raster_origin(mask, cell, origin)
    out = []
    for c in find_contours(padded, 0.5):
        # contour rows/cols in padded index space
        out.append(np.c_[ox + (c[:, 1] - 1.0) * cell, oy + (c[:, 0] - 1.0) * cell])
    return out


def raster_perimeter(mask, cell, d: Density, origin=None) -> float:
    """``int f ds`` along marching-squares contours of a boolean raster."""
    total = 0.0
    for poly in raster_contours(mask, cell, origin):
        x, y = poly[:, 0], poly[:, 1]
        mx, my = 0.5 * (x[1:] + x[:-1]), 0.5 * (y[1:] + y[:-1])
        ds = np.hypot(np.diff(x), np.diff(y))
        total += float(np.sum(_f(d, np.hypot(mx, my)) * ds))
    return total


def _raster_origin(mask, cell, origin):
    ny, nx = mask.shape
    if origin is None:
        # centre of the raster at the origin
        return -0.5 * (nx - 1) * cell, -0.5 * (ny - 1) * cell
    return origin


def _inside_polygons(px, py, edges):
    """Even-odd membership of points in the union of closed polygons."""
    x0, y0, x1, y1 = (e[None, :] for e in edges)
    px, py = px[:, None], py[:, None]
    straddle = (y0 > py) != (y1 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
    return (np.count_nonzero(straddle & (px < xc), axis=1) % 2) == 1


def polygon_section_lengths(polys, tau) -> np.ndarray:
    """
    ``L(tau)``: length of the circle of radius ``tau`` inside the union of
    closed polygons (even-odd rule), from the exact circle-edge crossings.
    """
    segs = [np.c_[p[:-1], p[1:]] for p in polys]
    E = np.concatenate(segs)
    x0, y0, x1, y1 = E.T
    dx, dy = x1 - x0, y1 - y0
    A = dx * dx + dy * dy
    Bh = x0 * dx + y0 * dy
    C0 = x0 * x0 + y0 * y0
    out = np.zeros(len(tau))
    for i, t in enumerate(tau):
        if t <= 0:
            continue
        disc = Bh * Bh - A * (C0 - t * t)
        ok = (disc >= 0) & (A > 0)
        sq = np.sqrt(np.where(ok, disc, 0.0))
        angles = []
        for sgn in (-1.0, 1.0):
            sp = np.where(ok, (-Bh + sgn * sq) / np.where(A > 0, A, 1.0), -1.0)
            hit = ok & (sp >= 0.0) & (sp < 1.0)
            angles.append(np.arctan2(y0[hit] + sp[hit] * dy[hit], x0[hit] + sp[hit] * dx[hit]))
        phi = np.sort(np.mod(np.concatenate(angles), TWO_PI))
        if phi.size == 0:
            inside = _inside_polygons(np.array([t]), np.array([0.0]), (x0, y0, x1, y1))[0]
            out[i] = TWO_PI * t if inside else 0.0
            continue
        nxt = np.concatenate([phi[1:], [phi[0] + TWO_PI]])
        mid = 0.5 * (phi + nxt)
        inside = _inside_polygons(t * np.cos(mid), t * np.sin(mid), (x0, y0, x1, y1))
        out[i] = t * float(np.sum((nxt - phi)[inside]))
    return out


def symmetrize_raster(mask, cell: float, d: Density, origin=None) -> SymmetrizationResult:
    """
    Cap symmetral of a rasterized set.

    Cells belong to the set when their centre does, which fixes the volume
    before.  The boundary is the marching-squares polygon through the
    cell-centre grid; its weighted length is the perimeter before, and the
    angular occupancy ``L(tau)`` of each circle inside that polygon gives
    the symmetral, with nodes at vertex radii, at the radii closest to each
    edge and on a half-cell grid.  ``eps_disc`` is ``4 cell P_before / R``
    with ``R`` the outer radius of the set, an O(cell) bound on the
    difference between centre membership and the polygon.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise DomainError("empty raster")
    ox, oy = _raster_origin(mask, cell, origin)
    yy, xx = np.nonzero(mask)
    rad = np.hypot(ox + xx * cell, oy + yy * cell)
    v_before = float(np.sum(_f(d, rad)) * cell * cell)
    polys = raster_contours(mask, cell, origin)
    p_before = raster_perimeter(mask, cell, d, origin)
    pts = np.concatenate(polys)
    r_vert = np.hypot(pts[:, 0], pts[:, 1])
    # radius of the point of each edge closest to the origin
    feet = []
    for p in polys:
        a, b = p[:-1], p[1:]
        e = b - a
        L2 = np.sum(e * e, axis=1)
        s_ = np.clip(-np.sum(a * e, axis=1) / np.where(L2 > 0, L2, 1.0), 0.0, 1.0)
        feet.append(np.hypot(*(a + s_[:, None] * e).T))
    r_lo, r_hi = float(np.min(np.concatenate(feet))), float(r_vert.max())
    # a circle through a vertex where the radius is extremal meets the
    # polygon once, which breaks the crossing parity: keep nodes off vertex
    # radii (midpoints between critical radii, a half-cell grid) and nudge
    # the end nodes inwards
    crit = np.unique(np.concatenate([r_vert, *feet]))
    grid = np.arange(r_lo, r_hi, 0.5 * cell)[1:]
    tau = np.unique(np.concatenate([0.5 * (crit[1:] + crit[:-1]), grid]))
    gap = 1e-9 * max(1.0, r_hi)
    near = np.abs(crit[np.clip(np.searchsorted(crit, tau), 0, crit.size - 1)] - tau)
    near = np.minimum(near, np.abs(crit[np.clip(np.searchsorted(crit, tau) - 1, 0, crit.size - 1)] - tau))
    tau = tau[(near > gap) & (tau > r_lo + gap) & (tau < r_hi - gap)]
    tau = np.concatenate([[r_lo + gap], tau, [r_hi - gap]])
    L = polygon_section_lengths(polys, tau)
    theta = L / (2.0 * tau)
    if _inside_polygons(np.array([0.0]), np.array([0.0]), np.concatenate([np.c_[p[:-1], p[1:]] for p in polys]).T)[0]:
        # the disc of radius r_lo lies in the set: full sections up to r_lo
        tau = np.concatenate([[0.0, r_lo], tau[1:]])
        theta = np.concatenate([[math.pi, math.pi], theta[1:]])
    prof = CapProfile.from_nodes(tau, np.clip(theta, 0.0, math.pi))
    p_after = _cap_perimeter(prof, d)
    v_after = _cap_volume(prof, d)
    eps = 4.0 * cell * p_before / (r_hi + cell)
    return SymmetrizationResult(prof, p_before, p_after, v_before, v_after, eps)


# -- kinematics -------------------------------------------------------------------


@dataclass(frozen=True)
class CurveSample:
    """
    Arc-length samples of a boundary curve with polar kinematics.

    ``rdot`` and ``rthetadot`` are differenced from ``r`` and ``theta``;
    ``k`` is differenced from the tangent angle ``alpha``.
    """

    s: np.ndarray
    x: np.ndarray
    y: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    alpha: np.ndarray
    sigma: np.ndarray
    k: np.ndarray
    rdot: np.ndarray
    rthetadot: np.ndarray
    speed: np.ndarray

    def identity_errors(self, trim=2):
        sl = slice(trim, -trim if trim else None)
        return (
            float(np.max(np.abs(self.rdot[sl] - np.cos(self.sigma[sl])))),
            float(np.max(np.abs(self.rthetadot[sl] - np.sin(self.sigma[sl])))),
            float(np.max(np.abs(self.speed[sl] - 1.0))),
        )


def _diff(v, ds, closed):
    """Central differences; periodic for closed curves (angles unwrap linearly)."""
    if not closed:
        return np.gradient(v, ds, edge_order=2)
    # remove the linear drift of an unwrapped angle before rolling
    drift = (v[-1] - v[0]) * len(v) / (len(v) - 1)
    jump = round(drift / TWO_PI) * TWO_PI
    fwd = np.roll(v, -1)
    fwd[-1] += jump
    bwd = np.roll(v, 1)
    bwd[0] -= jump
    return (fwd - bwd) / (2.0 * ds)


def curve_kinematics(points, n=4001, closed=False) -> CurveSample:
    """
    Resample an ordered point sequence by arc length and difference it.

    A cubic spline in chord length gives the arc-length reparametrisation;
    derivatives are then taken by central differences on the uniform grid.
    """
    pts = np.asarray(points, dtype=float)
    if closed:
        pts = np.vstack([pts, pts[:1]])
    chord = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    bc = "periodic" if closed else "not-a-knot"
    spl = CubicSpline(chord, pts, bc_type=bc)
    # arc length of the spline itself
    fine = np.linspace(0.0, chord[-1], 8 * n)
    sp = np.hypot(*spl(fine, 1).T)
    arc = np.concatenate([[0.0], np.cumsum(0.5 * (sp[1:] + sp[:-1]) * np.diff(fine))])
    if closed:
        s = np.linspace(0.0, arc[-1], n, endpoint=False)
    else:
        s = np.linspace(0.0, arc[-1], n)
    par = np.interp(s, arc, fine)
    xy = spl(par)
    x, y = xy[:, 0], xy[:, 1]
    ds = s[1] - s[0]
    dx, dy = _diff(x, ds, closed), _diff(y, ds, closed)
    speed = np.hypot(dx, dy)
    alpha = np.unwrap(np.arctan2(dy, dx))
    r = np.hypot(x, y)
    theta = np.unwrap(np.arctan2(y, x))
    sigma = alpha - theta
    k = _diff(alpha, ds, closed)
    rdot = _diff(r, ds, closed)
    rthetadot = r * _diff(theta, ds, closed)
    return CurveSample(s, x, y, r, theta, alpha, sigma, k, rdot, rthetadot, speed)


def circle_kinematics(r, n=4001) -> CurveSample:
    phi = np.linspace(0.0, TWO_PI, n, endpoint=False)
    return curve_kinematics(np.c_[r * np.cos(phi), r * np.sin(phi)], n=n, closed=True)


@dataclass(frozen=True)
class ProfileKinematics:
    tau: np.ndarray
    u: np.ndarray
    k: np.ndarray
    generalized: np.ndarray
    valid: np.ndarray
    skipped: int


def _smooth_runs(p: CapProfile):
    """Index ranges of nodes between jumps where ``0 < theta2 < pi``."""
    jump = np.abs(p.theta_right - p.theta_left) > 0
    runs = []
    start = 0
    for i in range(1, p.tau.size):
        if jump[i] or i == p.tau.size - 1:
            runs.append((start, i))
            start = i
    return runs


def profile_kinematics(p: CapProfile, d, slope_cap=20.0, n_curve=4001) -> ProfileKinematics:
    """
    ``u = -tau theta2' / sqrt(1 + (tau theta2')^2)`` and ``k + rho u`` per node.

    ``theta2'`` comes from a cubic spline on each smooth run; the curvature
    ``k`` from differencing the tangent angle of the arc-length resampled
    upper boundary, traversed with ``tau`` decreasing.  Nodes at run ends or
    with ``|tau theta2'| > slope_cap`` are skipped.
    """
    tau = p.tau
    u = np.full(tau.size, np.nan)
    k = np.full(tau.size, np.nan)
    valid = np.zeros(tau.size, dtype=bool)
    for i0, i1 in _smooth_runs(p):
        t = tau[i0 : i1 + 1]
        th = np.concatenate([[p.theta_right[i0]], 0.5 * (p.theta_left[i0 + 1 : i1] + p.theta_right[i0 + 1 : i1]), [p.theta_left[i1]]])
        if t.size < 4:
            continue
        inside = (th > 0) & (th < math.pi)
        if not inside[1:-1].any():
            continue
        spl = CubicSpline(t, th)
        slope = t * spl(t, 1)
        uu = -slope / np.sqrt(1.0 + slope * slope)
        ok = inside & (np.abs(slope) <= slope_cap)
        ok[0] = ok[-1] = False
        # curve traversed with tau decreasing
        tf = np.linspace(t[-1], t[0], n_curve)
        thf = spl(tf)
        curve = curve_kinematics(np.c_[tf * np.cos(thf), tf * np.sin(thf)], n=n_curve)
        kk = np.interp(t, curve.r[::-1], curve.k[::-1])
        u[i0 : i1 + 1] = np.where(ok, uu, u[i0 : i1 + 1])
        k[i0 : i1 + 1] = np.where(ok, kk, k[i0 : i1 + 1])
        valid[i0 : i1 + 1] |= ok
    rho = np.full(tau.size, np.nan)
    rho[valid] = d.rho(tau[valid], "mean")
    gen = k + rho * u
    return ProfileKinematics(tau, u, k, gen, valid, int(np.count_nonzero(~valid)))


def profile_from_u(u, a, b, theta_a, n=2001):
    """
    Profile with ``theta2' = -u / (tau sqrt(1 - u^2))`` and ``theta2(a) = theta_a``.

    ``u`` is a callable on ``[a, b]``; the integration uses the
    antiderivative of a cubic spline through the rate on Chebyshev-clustered
    nodes, dropping nodes where ``|u| = 1``.
    """
    s = 0.5 - 0.5 * np.cos(np.linspace(0.0, math.pi, n))
    t = a + (b - a) * s
    uu = np.asarray(u(t), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        rate = -uu / (t * np.sqrt(np.clip(1.0 - uu * uu, 0.0, None)))
    good = np.isfinite(rate)
    t, rate = t[good], rate[good]
    th = theta_a + CubicSpline(t, rate).antiderivative()(t)
    return CapProfile.from_nodes(t, th)


# -- shape files ----------------------------------------------------------------


def _component_from_record(rec, i):
    kind = rec.get("kind")
    try:
        if kind == "ball":
            return CenteredBall(float(rec["r"]))
        if kind == "annulus":
            return Annulus(float(rec["inner"]), float(rec["outer"]))
        if kind == "offcenter":
            cx, cy = rec["center"]
            return OffCenterBall(float(cx), float(cy), float(rec["r"]))
        if kind == "cap":
            tau = rec["tau"]
            tl = rec.get("theta_left", rec.get("theta"))
            tr = rec.get("theta_right", rec.get("theta"))
            return Cap(CapProfile(tau, tl, tr), float(rec.get("angle", 0.0)))
    except KeyError as exc:
        raise SpecParseError(f"component {i}: missing field", key=str(exc.args[0])) from None
    except (TypeError, ValueError, DomainError) as exc:
        raise SpecParseError(f"component {i}: {exc}", key="kind") from None
    raise SpecParseError(f"component {i}: unknown kind {kind!r}", key="kind")


def parse_shape_text(text: str) -> ShapeUnion:
    """JSON list of components: ``ball``, ``annulus``, ``offcenter`` or ``cap``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(exc.msg, line=exc.lineno) from None
    if isinstance(data, dict):
        data = data.get("components", [data])
    return ShapeUnion(tuple(_component_from_record(rec, i) for i, rec in enumerate(data)))


def load_shape(path) -> ShapeUnion:
    with open(path, encoding="utf-8") as fh:
        return parse_shape_text(fh.read())
