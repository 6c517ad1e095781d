"""
Isoperimetric profile of a radial log-convex density, unions of centered
annuli as competitors, and the plateau uniqueness probe.

With ``t_h = G(a_h)`` for decreasing radii ``a_0 > a_1 > ...``, a union of
annuli has ``V = 2 pi sum (-1)^h t_h`` and ``P = 2 pi sum J(t_h)``, while the
ball of the same volume has ``P = 2 pi J(sum (-1)^h t_h)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .density import Density, RadialKernel, kernel_covering
from .errors import DomainError, FeasibilityError
from .geometry import Annulus, CenteredBall, OffCenterBall, ShapeUnion, weighted_perimeter, weighted_volume

TWO_PI = 2.0 * math.pi
LEMMA_TOL = 1e-12


def profile_value(d: Density, v: float, kernel: RadialKernel | None = None):
    """
    Radius and perimeter of the centred ball of weighted volume ``v``:
    ``r = G^{-1}(v/2pi)`` and ``I_f(v) = 2 pi g(r) = 2 pi J(v/2pi)``.
    """
    if not v > 0:
        raise DomainError("v must be positive")
    k = kernel or kernel_covering(d, v / TWO_PI)
    r = float(k.G_inv(v / TWO_PI))
    return r, float(TWO_PI * k.g(r))


@dataclass(frozen=True)
class AnnuliConfig:
    """Decreasing radii ``a_0 > ... > a_{2N+1} >= 0``; annuli ``(a_{2h+1}, a_{2h})``."""

    radii: tuple

    def __post_init__(self):
        r = tuple(float(x) for x in self.radii)
        if len(r) < 2 or len(r) % 2:
            raise DomainError("annuli config needs an even number (>= 2) of radii")
        if r[-1] < 0 or any(q >= p for p, q in zip(r, r[1:])):
            raise DomainError("radii must be strictly decreasing and >= 0")
        object.__setattr__(self, "radii", r)

    @property
    def n_annuli(self):
        return len(self.radii) // 2

    def to_shape(self) -> ShapeUnion:
        comps = []
        for h in range(self.n_annuli):
            out, inn = self.radii[2 * h], self.radii[2 * h + 1]
            comps.append(CenteredBall(out) if inn == 0 else Annulus(inn, out))
        return ShapeUnion(tuple(comps))

    def t_values(self, k: RadialKernel):
        return np.asarray(k.G(np.array(self.radii)))


def _alternating(n):
    return np.where(np.arange(n) % 2 == 0, 1.0, -1.0)


def annuli_measures(c: AnnuliConfig, d: Density, kernel: RadialKernel | None = None):
    """``(V_f, P_f) = (2 pi sum (-1)^h G(a_h), 2 pi sum g(a_h))``."""
    k = kernel or RadialKernel(d, 0.0, c.radii[0] * (1 + 1e-12) + 1e-300)
    a = np.array(c.radii)
    t = np.asarray(k.G(a))
    V = TWO_PI * float(np.dot(_alternating(a.size), t))
    P = TWO_PI * float(np.sum(k.g(a)))
    return V, P


def superadditivity_check(d: Density, t_seq, tol=LEMMA_TOL, kernel: RadialKernel | None = None):
    """
    ``sum J(t_h) >= J(sum (-1)^h t_h)`` for ``t_0 > t_1 > ... >= 0``.

    Returns ``(lhs, rhs, holds)`` with ``holds = lhs >= rhs - tol * max(1, lhs)``.
    """
    t = np.asarray(t_seq, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise DomainError("need a non-empty sequence")
    if np.any(np.diff(t) >= 0) or t[-1] < 0:
        raise DomainError("sequence must be strictly decreasing and nonnegative")
    k = kernel or kernel_covering(d, float(t[0]))
    lhs = float(np.sum(k.J(t)))
    rhs = float(k.J(float(np.dot(_alternating(t.size), t))))
    return lhs, rhs, lhs >= rhs - tol * max(1.0, lhs)


@dataclass
class CompetitionResult:
    v: float
    r: float
    I: float
    best: AnnuliConfig | None
    best_perimeter: float
    gap: float
    n_annuli: int
    trials: int
    seed: int
    n_evals: int
    max_volume_error: float
    lemma_checks: int
    lemma_failures: int
    min_lemma_margin: float
    trace: list = field(default_factory=list, repr=False)

    def to_record(self):
        return {
            "v": self.v,
            "r": self.r,
            "I_f": self.I,
            "N": self.n_annuli,
            "gap": self.gap,
            "best_perimeter": self.best_perimeter,
            "best_radii": list(self.best.radii) if self.best else None,
            "seed": self.seed,
            "trials": self.trials,
            "n_evals": self.n_evals,
            "max_volume_error": self.max_volume_error,
            "lemma_checks": self.lemma_checks,
            "lemma_failures": self.lemma_failures,
            "min_lemma_margin": self.min_lemma_margin,
        }


class _Objective:
    """
    Perimeters of configs whose outer radius is fixed by the volume.

    ``evaluate`` takes a batch of inner-radius vectors (absolute values,
    sorted decreasing) and returns ``inf`` for infeasible rows; every
    feasible evaluation is logged for the audit.
    """

    def __init__(self, k: RadialKernel, v: float, n_inner: int, r_box: float):
        self.k = k
        self.target = v / TWO_PI
        self.signs = np.where(np.arange(n_inner) % 2 == 0, 1.0, -1.0)
        self.r_box = r_box
        self.G_max = k.G_max
        self._log_a: list = []
        self._log_P: list = []

    def solve(self, Y):
        """Radii ``(a_0, inner...)`` per row (NaN when infeasible) and perimeters."""
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        m, n = Y.shape
        inner = -np.sort(-np.abs(Y), axis=1)
        A = np.full((m, n + 1), np.nan)
        P = np.full(m, math.inf)
        rows = np.nonzero(inner[:, 0] < self.r_box)[0]
        if rows.size == 0:
            return A, P
        t, g = self.k.G_and_g(inner[rows].ravel())
        t, g = t.reshape(rows.size, n), g.reshape(rows.size, n)
        t0 = self.target + t @ self.signs
        ok = t0 < self.G_max
        rows, t0, g = rows[ok], t0[ok], g[ok]
        if rows.size == 0:
            return A, P
        a0 = self.k.G_inv_batch(t0)
        ok = a0 > inner[rows, 0]
        rows, a0, g = rows[ok], a0[ok], g[ok]
        A[rows, 0] = a0
        A[rows, 1:] = inner[rows]
        P[rows] = TWO_PI * (np.asarray(self.k.g(a0)) + g.sum(axis=1))
        return A, P

    def evaluate(self, Y):
        A, P = self.solve(Y)
        ok = np.isfinite(P)
        if np.any(ok):
            self._log_a.append(A[ok])
            self._log_P.append(P[ok])
        return P

    def radii(self, y):
        A, _ = self.solve(y)
        return None if np.isnan(A[0, 0]) else A[0]

    @property
    def log(self):
        if not self._log_a:
            return np.zeros((0, self.signs.size + 1)), np.zeros(0)
        return np.concatenate(self._log_a), np.concatenate(self._log_P)


def _random_start(rng, obj: _Objective, n_inner, r_ball, retries=200):
    for _ in range(retries):
        span = r_ball * rng.uniform(0.2, 1.5)
        y = np.sort(rng.uniform(0.0, span, n_inner))[::-1]
        if obj.radii(y) is not None:
            return y
    raise FeasibilityError("no feasible random start found")


def nelder_mead_batch(fun, X0, maxiter, xatol=1e-12, fatol=1e-14):
    """
    Independent Nelder-Mead runs advanced in lockstep so that every step
    evaluates ``fun`` once on the stacked candidate points of all runs.

    Standard coefficients (reflection 1, expansion 2, contraction 1/2,
    shrink 1/2) and the usual initial simplex (5% of each nonzero
    coordinate, 0.00025 for zeros).  A run stops when the simplex spread
    is within ``xatol`` and the value spread within ``fatol`` (status 0),
    or after ``maxiter[i]`` iterations (status 2).

    Returns ``(x_best, f_best, iterations, status)`` per run.
    """
    X0 = np.atleast_2d(np.asarray(X0, dtype=float))
    B, n = X0.shape
    maxiter = np.broadcast_to(np.asarray(maxiter, dtype=int), (B,)).copy()
    sim = np.repeat(X0[:, None, :], n + 1, axis=1)
    for j in range(n):
        col = sim[:, j + 1, j]
        sim[:, j + 1, j] = np.where(col != 0, 1.05 * col, 0.00025)
    fsim = fun(sim.reshape(-1, n)).reshape(B, n + 1)
    order = np.argsort(fsim, axis=1, kind="stable")
    sim = np.take_along_axis(sim, order[:, :, None], axis=1)
    fsim = np.take_along_axis(fsim, order, axis=1)
    iters = np.ones(B, dtype=int)
    status = np.full(B, 2)
    active = np.ones(B, dtype=bool)
    while True:
        with np.errstate(invalid="ignore"):
            xs = np.max(np.abs(sim[:, 1:] - sim[:, :1]), axis=(1, 2))
            fs = np.max(np.abs(fsim[:, :1] - fsim[:, 1:]), axis=1)
        conv = active & (xs <= xatol) & (fs <= fatol)
        status[conv] = 0
        active &= ~conv & (iters < maxiter)
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        S, F = sim[idx], fsim[idx]
        xbar = S[:, :-1].mean(axis=1)
        xw = S[:, -1]
        xr = 2.0 * xbar - xw
        fxr = fun(xr)
        new_x, new_f = xr.copy(), fxr.copy()
        shrink = np.zeros(idx.size, dtype=bool)
        exp = fxr < F[:, 0]
        if np.any(exp):
            xe = 3.0 * xbar[exp] - 2.0 * xw[exp]
            fxe = fun(xe)
            better = fxe < fxr[exp]
            new_x[exp] = np.where(better[:, None], xe, xr[exp])
            new_f[exp] = np.where(better, fxe, fxr[exp])
        rest = ~exp & ~(fxr < F[:, -2])
        if np.any(rest):
            outside = rest & (fxr < F[:, -1])
            xc = np.where(outside[:, None], 1.5 * xbar - 0.5 * xw, 0.5 * xbar + 0.5 * xw)[rest]
            fxc = fun(xc)
            r_out = outside[rest]
            accept = np.where(r_out, fxc <= fxr[rest], fxc < F[rest, -1])
            ri = np.nonzero(rest)[0]
            new_x[ri[accept]] = xc[accept]
            new_f[ri[accept]] = fxc[accept]
            shrink[ri[~accept]] = True
        keep = ~shrink
        S[keep, -1] = new_x[keep]
        F[keep, -1] = new_f[keep]
        if np.any(shrink):
            Ss = S[shrink]
            Ss[:, 1:] = Ss[:, :1] + 0.5 * (Ss[:, 1:] - Ss[:, :1])
            F[shrink, 1:] = fun(Ss[:, 1:].reshape(-1, n)).reshape(-1, n)
            S[shrink] = Ss
        order = np.argsort(F, axis=1, kind="stable")
        sim[idx] = np.take_along_axis(S, order[:, :, None], axis=1)
        fsim[idx] = np.take_along_axis(F, order, axis=1)
        iters[idx] += 1
    return sim[:, 0].copy(), fsim[:, 0].copy(), iters, status


def compete(
    d: Density,
    v: float,
    N: int = 1,
    trials: int = 32,
    seed: int = 0,
    max_iter_per_annulus: int = 200,
    keep_trace: bool = False,
) -> CompetitionResult:
    """
    Best union of ``N`` centred annuli of weighted volume ``v`` found by
    multi-start Nelder-Mead, compared with the centred ball.

    The inner radii are free (their absolute values, sorted); the outermost
    radius is solved from the volume constraint, so every evaluated config
    has volume ``v`` by construction.  Each trial uses the generator
    ``default_rng([seed, trial])``.  After the search every evaluated config
    is re-audited with the vectorised kernel: volume error and the
    ``sum J(t_h) >= J(alternating sum)`` chain.
    """
    if not v > 0:
        raise DomainError("v must be positive")
    if N < 1:
        raise DomainError("N must be >= 1")
    if trials < 1:
        raise DomainError("trials must be >= 1")
    n_inner = 2 * N + 1
    ball_kernel = kernel_covering(d, v / TWO_PI)
    r = float(ball_kernel.G_inv(v / TWO_PI))
    r_box = 3.0 * r
    # the outer radius satisfies G(a0) <= v/2pi + G(a1) < v/2pi + G(r_box)
    k = kernel_covering(d, v / TWO_PI + _G_at(d, r_box), start=r_box)
    I = float(TWO_PI * k.g(r))
    obj = _Objective(k, v, n_inner, r_box)
    maxiter = max_iter_per_annulus * N
    x = np.array([_random_start(np.random.default_rng([seed, trial]), obj, n_inner, r) for trial in range(trials)])
    used = np.zeros(trials, dtype=int)
    eligible = np.ones(trials, dtype=bool)
    for _restart in range(3):
        idx = np.nonzero(eligible)[0]
        if idx.size == 0:
            break
        xb, _, nit, status = nelder_mead_batch(obj.evaluate, x[idx], maxiter - used[idx], 1e-12, 1e-14)
        x[idx] = xb
        used[idx] += np.maximum(nit, 1)
        # a collapsed simplex before the cap restarts around the current point
        eligible[idx] = (status == 0) & (used[idx] < maxiter)
    best_a, best_P = None, math.inf
    A, P = obj.solve(x)
    for a, p in zip(A, P):
        if p < best_P:
            best_P, best_a = float(p), a
    # audit every evaluated config with the vectorised kernel
    radii, perims = obj.log
    if perims.size:
        i = int(np.argmin(perims))
        if perims[i] < best_P:
            best_P, best_a = float(perims[i]), radii[i]
    t = np.asarray(k.G(radii))
    alt = t @ _alternating(radii.shape[1])
    vol_err = float(np.max(np.abs(TWO_PI * alt - v)) / v) if perims.size else 0.0
    lhs = np.sum(np.asarray(k.g(radii)), axis=1)
    rhs = np.asarray(k.J(np.clip(alt, 0.0, None)))
    margin = (lhs - rhs) / np.maximum(1.0, lhs)
    fails = int(np.count_nonzero(margin < -LEMMA_TOL))
    best = _config_or_none(best_a)
    trace = [(i, *a.tolist(), float(p)) for i, (a, p) in enumerate(zip(radii, perims))] if keep_trace else []
    return CompetitionResult(
        v=float(v),
        r=r,
        I=I,
        best=best,
        best_perimeter=best_P,
        gap=best_P - I,
        n_annuli=N,
        trials=trials,
        seed=seed,
        n_evals=int(perims.size),
        max_volume_error=vol_err,
        lemma_checks=int(perims.size),
        lemma_failures=fails,
        min_lemma_margin=float(np.min(margin)) if margin.size else 0.0,
        trace=trace,
    )


def _G_at(d, x):
    return RadialKernel(d, 0.0, x).G_max


def _config_or_none(a):
    if a is None:
        return None
    a = np.asarray(a)
    # optimizer may drive inner radii together; keep the distinct ones
    try:
        return AnnuliConfig(tuple(a))
    except DomainError:
        return None


def write_trace(path, result: CompetitionResult):
    n = 2 * result.n_annuli + 2
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["eval", *[f"a{i}" for i in range(n)], "perimeter", "gap"])
        for row in result.trace:
            w.writerow([row[0], *[f"{x:.15g}" for x in row[1:]], f"{row[-1] - result.I:.15g}"])


# -- plateau uniqueness probe -----------------------------------------------------


def _ball_with_volume(d, center_dist, v, r_hi):
    """Radius of the off-centre ball at ``(center_dist, 0)`` with ``V_f = v``."""

    def fn(r):
        return weighted_volume(OffCenterBall(center_dist, 0.0, r), d) - v

    return brentq(fn, 1e-9 * r_hi, r_hi, xtol=1e-14, rtol=1e-15)


def uniqueness_probe(d: Density, v: float, centers=None, tie_tol=1e-9, strict_tol=1e-4):
    """
    Compare the centred ball with off-centre balls (and, above the plateau
    volume, an annulus) of the same weighted volume.

    ``R = inf{rho > 0}`` must be finite and positive.  The plateau volume is
    reported both as the Lebesgue area ``pi R^2`` and weighted by the
    constant density on the plateau, ``e^{h(0)} pi R^2``; the weighted value
    decides which regime ``v`` is in.
    """
    R = d.plateau_radius
    if R is None or not R > 0:
        raise DomainError("density needs a finite positive plateau radius R = inf{rho > 0}")
    if not v > 0:
        raise DomainError("v must be positive")
    f0 = math.exp(float(d.h(0.0)))
    v0_leb = math.pi * R * R
    v0_w = f0 * v0_leb
    r_c, I = profile_value(d, v)
    rows = []
    inside = v <= v0_w
    if centers is None:
        if inside:
            room = R - r_c
            centers = [0.25 * room, 0.5 * room, room, room + 0.2 * r_c, room + 0.5 * r_c]
        else:
            centers = [0.1 * r_c, 0.2, 0.5 * r_c, r_c]
    for c in centers:
        if c <= 0:
            continue
        rad = _ball_with_volume(d, c, v, 4.0 * r_c + c)
        P = weighted_perimeter(OffCenterBall(c, 0.0, rad), d)
        in_plateau = c + rad <= R * (1 + 1e-12)
        kind = "inside" if in_plateau else "protruding"
        expect = "tie" if in_plateau else "strict"
        gap = P - I
        ok = abs(gap) <= tie_tol if expect == "tie" else gap > strict_tol
        rows.append({"competitor": "offcenter-ball", "center": c, "radius": rad, "kind": kind,
                     "perimeter": P, "gap": gap, "expect": expect, "ok": bool(ok)})
    if not inside:
        # thin inner hole: an annulus of the same volume
        k = kernel_covering(d, v / TWO_PI + 1.0)
        hole = 0.25 * r_c
        t0 = v / TWO_PI + float(k.G(hole))
        outer = float(k.G_inv(t0))
        V, P = annuli_measures(AnnuliConfig((outer, hole)), d, k)
        gap = P - I
        rows.append({"competitor": "annulus", "center": 0.0, "radius": outer, "kind": "annulus",
                     "perimeter": P, "gap": gap, "expect": "strict", "ok": bool(gap > strict_tol)})
    return {
        "R": R,
        "v": float(v),
        "v0_lebesgue": v0_leb,
        "v0_weighted": v0_w,
        "regime": "v<=v0" if inside else "v>v0",
        "ball_radius": r_c,
        "I_f": I,
        "rows": rows,
        "ok": all(r["ok"] for r in rows),
    }
