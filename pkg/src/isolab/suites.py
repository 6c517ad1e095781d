"""
Verification suites shared by the ``verify`` subcommand and the tests.

Every suite returns a :class:`SuiteResult` whose ``rows`` share one column
layout (:data:`COLUMNS`).  A row is either a scalar check (``t`` empty) or
one threshold of a distribution-function comparison.  The sign convention
is uniform: a row passes when ``margin >= -tol``; inequalities
``lhs <= rhs`` have ``margin = rhs - lhs`` and equalities have
``margin = -|lhs - rhs|``.

Instance ``i`` of a suite draws from ``default_rng([seed, stream, i])``, so
results depend only on ``(suite, seed, count)``.  The coefficient suites
accept a density: with ``a`` and ``b`` its ``rho`` is checked on that one
interval, otherwise on the seeded random intervals in place of the random
step coefficients.  ``ISOLAB_THREADS`` (default
1) sets the number of worker processes; results are collected in instance
order, so output does not depend on it.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import dist as D
from .bvp import (
    ETAS,
    shoot_linear,
    shoot_origin,
    shoot_riccati,
    solve_linear,
    solve_origin,
    solve_riccati,
)
from .density import Density, RhoFunction, build_kernel
from .errors import HypothesisError, IsolabError
from .geometry import (
    Cap,
    CapProfile,
    CenteredBall,
    ShapeUnion,
    symmetrize,
)
from .isoperimetry import compete, uniqueness_probe
from .means import ENDMEAN_UPPER, MEAN_UPPER, verify_means
from .sampling import instance_rng, random_density, random_interval, random_step_rho

COLUMNS = ("suite", "instance", "statement", "t", "a", "b", "lhs", "rhs", "margin", "tol", "passed", "note")
SUITES = ("hermite", "linear", "riccati", "bvp", "symmetrization", "isoperimetric")
DEFAULT_SEED = 20240611

# default instance counts
DEFAULT_COUNTS = {
    "hermite": 1000,
    "linear": 200,
    "riccati": 200,
    "bvp": 100,
    "symmetrization": 100,
    "isoperimetric": 50,
}

# tolerances
MEANS_TOL = 1e-9
RHO_ZERO = 1e-12
DIST_TOL = 1e-6
EQ_TOL = 1e-8
LINEAR_INTEGRAL_TOL = 1e-5
LINEAR_CONTROL_TOL = 2e-6
RICCATI_INTEGRAL_TOL = 1e-5
SLOPE_TOL = 1e-4
FD_CROSS_TOL = 1e-2
SUP_TOL = 1e-8
ANCHOR_TOL = 1e-9
RESIDUAL_TOL = 1e-7
SHOOT_TOL = 1e-7
GAP_TOL = 1e-7
VOLUME_TOL = 1e-9
TIE_TOL = 1e-9
STRICT_TOL = 1e-4
FIXED_TOL = 1e-9

# rejection sampling gives up after this many draws per requested instance
MAX_DRAWS = 50


@dataclass
class SuiteResult:
    suite: str
    seed: int
    count: int
    rows: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def checks(self):
        """Scalar check rows (one per statement and instance)."""
        return [r for r in self.rows if r["t"] is None]

    @property
    def failures(self):
        return [r for r in self.rows if not r["passed"]]

    @property
    def failing_statements(self):
        return sorted({r["statement"] for r in self.failures})

    @property
    def passed(self):
        return not self.failures

    def by_statement(self):
        """``{statement: (n_checks, n_failed, worst_margin)}`` over scalar rows."""
        out = {}
        for r in self.checks:
            n, f, w = out.get(r["statement"], (0, 0, math.inf))
            out[r["statement"]] = (n + 1, f + (not r["passed"]), min(w, r["margin"]))
        return dict(sorted(out.items()))

    def summary(self):
        return {
            "suite": self.suite,
            "seed": self.seed,
            "count": self.count,
            "passed": self.passed,
            "failing": self.failing_statements,
            "statements": {k: {"checks": n, "failed": f, "worst_margin": w} for k, (n, f, w) in self.by_statement().items()},
            **self.info,
        }


def _row(suite, instance, statement, lhs, rhs, tol, *, a=None, b=None, t=None, equality=False, note="", margin=None):
    lhs, rhs = float(lhs), float(rhs)
    if margin is None:
        margin = -abs(lhs - rhs) if equality else rhs - lhs
    margin = float(margin)
    return {
        "suite": suite,
        "instance": instance,
        "statement": statement,
        "t": None if t is None else float(t),
        "a": None if a is None else float(a),
        "b": None if b is None else float(b),
        "lhs": lhs,
        "rhs": rhs,
        "margin": margin,
        "tol": float(tol),
        "passed": bool(margin >= -tol),
        "note": note,
    }


def _report_rows(suite, i, rep: D.ComparisonReport, a, b, detail=True):
    """Threshold rows plus one scalar row carrying the worst violation."""
    rows = []
    if detail:
        for t, l, r in zip(rep.thresholds, rep.lhs, rep.rhs):
            rows.append(_row(suite, i, rep.statement, l, r, rep.tol, a=a, b=b, t=t))
    win = rep.strict_window
    note = f"strict={win[0]:.6g}..{win[1]:.6g}" if win else "strict=none"
    if rep.equality:
        note += ";equality"
    if rep.skipped:
        note += f";skipped={rep.skipped}"
    rows.append(_row(suite, i, rep.statement, rep.max_violation, 0.0, rep.tol, a=a, b=b, note=note))
    return rows


def workers() -> int:
    try:
        return max(1, int(os.environ.get("ISOLAB_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, args):
    n = workers()
    if n == 1 or len(args) < 2:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(_star, [(fn, a) for a in args]))


def _star(pair):
    fn, a = pair
    return fn(*a)


def _flatten(chunks):
    return [r for c in chunks for r in c]


def _random_rho(rng, a, b):
    """Step coefficient with increments scaled by ``s / (b - a)``, ``s`` log-uniform on [0.01, 3]."""
    s = math.exp(rng.uniform(math.log(0.01), math.log(3.0)))
    return random_step_rho(rng, a, b, scale=s / (b - a))


def _user_instance(density, a, b):
    """``(density, a, b)`` for a single-instance run, else ``None``."""
    if density is None or (a is None and b is None):
        return None
    if a is None or b is None:
        raise IsolabError("a single-instance run needs both a and b")
    return density, float(a), float(b)


def _record_draws(res, out):
    res.info["rejected_draws"] = int(sum(k for _, k in out))
    res.info["unfilled"] = int(sum(1 for r, _ in out if not r))


# -- hermite ------------------------------------------------------------------


def _hermite_rows(i, rho, a, b):
    rep = verify_means(rho, a, b, tol=MEANS_TOL)
    rows = []
    zero = rep.rho_b <= RHO_ZERO
    for rec in rep.rows():
        rows.append(
            _row("hermite", i, rec["statement"], rec["lhs"], rec["rhs"], MEANS_TOL, a=a, b=b, margin=rec["margin"],
                 note=("equality" if rec["equality"] else "") + (";rho=0" if zero else ""))
        )
        # equality in the two upper bounds is allowed only for rho = 0
        if rec["statement"] in (MEAN_UPPER, ENDMEAN_UPPER):
            bad = rec["equality"] and not zero
            rows.append(
                _row("hermite", i, rec["statement"] + "-equality-case", float(bad), 0.0, 0.0, a=a, b=b,
                     note=f"equality={rec['equality']};sup_rho={rep.rho_b:.6g}")
            )
    return rows


def _hermite_instance(seed, i, source=None):
    rng = instance_rng(seed, i, 1)
    a, b = random_interval(rng, 0.0, 10.0)
    rho = random_step_rho(rng, a, b, scale=1.0) if source is None else source
    return _hermite_rows(i, rho, a, b)


def run_hermite(n=DEFAULT_COUNTS["hermite"], seed=DEFAULT_SEED, density=None, a=None, b=None) -> SuiteResult:
    """
    Mean inequalities on random step coefficients on ``[a, b]`` inside
    ``(0, 10]`` (margins relative to the larger side), plus the zero-coefficient control on ``[1, 3]`` as instance
    ``-1``.  Equality in either upper bound must coincide with ``rho = 0``.
    """
    res = SuiteResult("hermite", seed, n)
    user = _user_instance(density, a, b)
    if user is not None:
        res.rows = _hermite_rows(0, *user)
        res.count = 1
        return res
    rows = _hermite_rows(-1, RhoFunction.constant(1.0, 3.0, 0.0), 1.0, 3.0)
    rows += _flatten(_map(_hermite_instance, [(seed, i, density) for i in range(n)]))
    res.rows = rows
    eq = [r for r in rows if r["statement"].endswith("-equality-case") and "equality=True" in r["note"]]
    res.info["equality_cases"] = len(eq)
    return res


# -- linear comparison ----------------------------------------------------------


def _odd_generic(s):
    return s


def _linear_checks(i, rho, a, b, detail=True):
    sol = solve_linear(rho, a, b, (1, -1))
    rep = D.compare_linear(rho, a, b, tol=DIST_TOL, sol=sol)
    rows = _report_rows("linear", i, rep, a, b, detail)
    rows.append(_row("linear", i, D.LINEAR_INTEGRAL, rep.extra["integral"], 0.0, LINEAR_INTEGRAL_TOL, a=a, b=b))
    gen = D.weighted_integral(_odd_generic, sol)
    rows.append(_row("linear", i, "linear-generic-odd-integral", gen, 0.0, LINEAR_INTEGRAL_TOL, a=a, b=b, note="phi(s)=s"))
    return rows


def _origin_rows(i, rho, b, strict_at=None):
    sol = solve_origin(rho, b)
    t = np.linspace(0.0, b, 2001)
    gap = np.asarray(sol.u(t)) - t / b
    rows = [_row("linear", i, "origin-lower-bound", 0.0, float(np.min(gap)), ANCHOR_TOL, a=0.0, b=b)]
    if strict_at is not None:
        g = float(sol.u(strict_at)) - strict_at / b
        rows.append(_row("linear", i, "origin-strict", STRICT_TOL, g, 0.0, a=0.0, b=b, t=None, note=f"t={strict_at:g}"))
    return rows


def _linear_instance(seed, i, source=None):
    rng = instance_rng(seed, i, 2)
    for draw in range(MAX_DRAWS):
        a, b = random_interval(rng, 0.0, 10.0)
        rho = _random_rho(rng, a, b) if source is None else source
        try:
            rows = _linear_checks(i, rho, a, b)
        except HypothesisError:
            continue
        bo = float(rng.uniform(0.1, 10.0))
        rows += _origin_rows(i, _random_rho(rng, 0.0, bo) if source is None else source, bo)
        return rows, draw
    return [], MAX_DRAWS


def run_linear(n=DEFAULT_COUNTS["linear"], seed=DEFAULT_SEED, density=None, a=None, b=None) -> SuiteResult:
    """
    ``(1, -1)`` linear problem: distribution comparison with ``v = -u`` and
    the odd-integrand integrals on instances with ``u > -1``, the origin
    problem lower bound ``u >= t/b``, and the zero-coefficient controls.
    Instances failing the hypothesis are redrawn and counted; an instance
    without an admissible draw after ``MAX_DRAWS`` attempts is counted as
    ``unfilled``.
    """
    res = SuiteResult("linear", seed, n)
    user = _user_instance(density, a, b)
    if user is not None:
        res.rows = _linear_checks(0, *user)
        res.count = 1
        return res
    rows = []
    # controls: rho = 0 on [1, 3] and the origin problem on [0, 2]
    zero = RhoFunction.constant(1.0, 3.0, 0.0)
    rep = D.compare_linear(zero, 1.0, 3.0, tol=DIST_TOL)
    rows.append(_row("linear", -1, "linear-control-equality", float(np.max(np.abs(rep.rhs - rep.lhs))), 0.0, EQ_TOL, a=1, b=3))
    rows.append(_row("linear", -1, "linear-control-integral", rep.extra["integral"], 0.0, LINEAR_CONTROL_TOL, a=1, b=3, equality=True))
    o = solve_origin(RhoFunction.constant(0.0, 2.0, 0.0), 2.0)
    val = D.weighted_integral("odd-increasing", o)
    rows.append(_row("linear", -1, "origin-integral", val, math.pi / 2, ANCHOR_TOL, a=0, b=2, equality=True))
    step = RhoFunction.step(0.0, 2.0, [1.0], [0.0, 2.0])
    rows += _origin_rows(-1, step, 2.0, strict_at=1.0)
    out = _map(_linear_instance, [(seed, i, density) for i in range(n)])
    rows += _flatten(r for r, _ in out)
    res.rows = rows
    _record_draws(res, out)
    return res


# -- riccati comparison ---------------------------------------------------------


def _exp_decreasing(s):
    return np.exp(-s)


def _riccati_checks(i, rho, a, b, detail=True):
    sol = solve_riccati(rho, a, b)
    dist, slope, sup = D.compare_riccati(rho, a, b, tol=DIST_TOL, slope_tol=SLOPE_TOL, sup_tol=SUP_TOL, sol=sol)
    rows = []
    for rep in (dist, slope, sup):
        rows += _report_rows("riccati", i, rep, a, b, detail and rep is not sup)
    rows.append(_row("riccati", i, "riccati-slope-cross-check", slope.extra["fd_discrepancy"], 0.0, FD_CROSS_TOL, a=a, b=b,
                     note="relative gap between level-set and finite-difference slopes"))
    rows.append(_row("riccati", i, D.RICCATI_INTEGRAL, math.pi, dist.extra["integral"], RICCATI_INTEGRAL_TOL, a=a, b=b))
    lhs = D.weighted_integral(_exp_decreasing, lambda x: D.w0(x, a, b), a, b)
    rhs = D.weighted_integral(_exp_decreasing, sol)
    rows.append(_row("riccati", i, "riccati-generic-decreasing-integral", lhs, rhs, ANCHOR_TOL, a=a, b=b, note="phi(s)=exp(-s)"))
    return rows


def _riccati_instance(seed, i, source=None):
    rng = instance_rng(seed, i, 3)
    for draw in range(MAX_DRAWS):
        a, b = random_interval(rng, 0.0, 10.0)
        rho = _random_rho(rng, a, b) if source is None else source
        try:
            return _riccati_checks(i, rho, a, b), draw
        except HypothesisError:
            continue
    return [], MAX_DRAWS


def run_riccati(n=DEFAULT_COUNTS["riccati"], seed=DEFAULT_SEED, density=None, a=None, b=None) -> SuiteResult:
    """
    Riccati comparisons against ``w0`` on instances with ``w > 1`` inside
    ``(a, b)``: distribution functions, the slope inequality, the sup bound
    and the decreasing-integrand integrals, plus the zero-coefficient
    anchors on ``[1, 3]``.
    """
    res = SuiteResult("riccati", seed, n)
    user = _user_instance(density, a, b)
    if user is not None:
        res.rows = _riccati_checks(0, *user)
        res.count = 1
        return res
    rows = []
    a0, b0 = 1.0, 3.0
    zero = RhoFunction.constant(a0, b0, 0.0)
    sol = solve_riccati(zero, a0, b0)
    dist, slope, sup = D.compare_riccati(zero, a0, b0, tol=DIST_TOL, sol=sol)
    rows.append(_row("riccati", -1, "riccati-control-equality", float(np.max(np.abs(dist.rhs - dist.lhs))), 0.0, EQ_TOL, a=a0, b=b0))
    rows.append(_row("riccati", -1, "riccati-control-integral", dist.extra["integral"], math.pi, ANCHOR_TOL, a=a0, b=b0, equality=True))
    rows.append(_row("riccati", -1, "riccati-control-sup", sol.sup_w, D.w0_sup(a0, b0), ANCHOR_TOL, a=a0, b=b0, equality=True))
    lhs = 1.0 / abs(a0 * sol.du(a0, "right")) + 1.0 / abs(b0 * sol.du(b0, "left"))
    rhs = 2.0 / math.tanh(math.log(b0 / a0) / 2.0)
    rows.append(_row("riccati", -1, "riccati-control-endpoint-sum", lhs, rhs, ANCHOR_TOL, a=a0, b=b0, equality=True))
    out = _map(_riccati_instance, [(seed, i, density) for i in range(n)])
    rows += _flatten(r for r, _ in out)
    res.rows = rows
    _record_draws(res, out)
    return res


# -- bvp validity -----------------------------------------------------------------


def _bvp_checks(i, rho, a, b, origin=None):
    rows = []
    for eta in ETAS:
        sol = solve_linear(rho, a, b, eta)
        tag = f"eta=({eta[0]},{eta[1]})"
        rows.append(_row("bvp", i, "linear-residual", sol.residual_max, 0.0, RESIDUAL_TOL, a=a, b=b, note=tag))
        rows.append(_row("bvp", i, "linear-uniqueness", sol.lam, shoot_linear(rho, a, b, eta), SHOOT_TOL, a=a, b=b, equality=True, note=tag))
    sol = solve_riccati(rho, a, b)
    rows.append(_row("bvp", i, "riccati-residual", sol.residual_max, 0.0, RESIDUAL_TOL, a=a, b=b))
    rows.append(_row("bvp", i, "riccati-uniqueness", sol.lam, shoot_riccati(rho, a, b), SHOOT_TOL, a=a, b=b, equality=True))
    if origin is not None:
        orho, ob = origin
        sol = solve_origin(orho, ob)
        rows.append(_row("bvp", i, "origin-residual", sol.residual_max, 0.0, RESIDUAL_TOL, a=0.0, b=ob))
        rows.append(_row("bvp", i, "origin-uniqueness", sol.lam, shoot_origin(orho, ob), SHOOT_TOL, a=0.0, b=ob, equality=True))
    return rows


def _bvp_instance(seed, i, source=None):
    rng = instance_rng(seed, i, 4)
    a, b = random_interval(rng, 0.0, 10.0)
    rho = _random_rho(rng, a, b) if source is None else source
    ob = float(rng.uniform(0.1, 10.0))
    orho = _random_rho(rng, 0.0, ob) if source is None else source
    return _bvp_checks(i, rho, a, b, (orho, ob))


def run_bvp(n=DEFAULT_COUNTS["bvp"], seed=DEFAULT_SEED, density=None, a=None, b=None) -> SuiteResult:
    """Finite-difference residuals and closed-form versus shooting ``lam``
    for every sign pattern, the Riccati problem and the origin problem."""
    res = SuiteResult("bvp", seed, n)
    user = _user_instance(density, a, b)
    if user is not None:
        d, a, b = user
        res.rows = _bvp_checks(0, d, a, b, (d, b))
        res.count = 1
        return res
    res.rows = _flatten(_map(_bvp_instance, [(seed, i, density) for i in range(n)]))
    return res


# -- symmetrization ---------------------------------------------------------------


def random_cap_union(rng) -> ShapeUnion:
    """
    ``k`` caps with axes ``2 pi j / k`` (plus a common rotation) and
    half-widths at most ``0.95 pi / k``, so they are pairwise disjoint;
    sometimes a centred ball below the caps.
    """
    k = int(rng.integers(1, 6))
    rot = float(rng.uniform(0.0, 2.0 * math.pi))
    comps = []
    lo_min = math.inf
    for j in range(k):
        n = int(rng.integers(3, 9))
        lo = float(rng.uniform(0.2, 1.5))
        tau = lo + np.cumsum(np.concatenate([[0.0], rng.uniform(0.05, 0.6, n - 1)]))
        theta = rng.uniform(0.0, 0.95 * math.pi / k, n)
        comps.append(Cap(CapProfile.from_nodes(tau, theta), rot + 2.0 * math.pi * j / k))
        lo_min = min(lo_min, lo)
    if rng.uniform() < 1.0 / 3.0:
        comps.append(CenteredBall(float(rng.uniform(0.05, 0.9)) * lo_min))
    return ShapeUnion(tuple(comps))


def _sym_rows(i, shape, d):
    r = symmetrize(shape, d)
    eps = r.eps_disc
    return [
        _row("symmetrization", i, "symmetral-volume", r.volume_after, r.volume_before, eps, equality=True),
        _row("symmetrization", i, "symmetral-perimeter", r.perimeter_after, r.perimeter_before, eps,
             note=f"components={len(shape.components)}"),
    ]


def _sym_instance(seed, i):
    rng = instance_rng(seed, i, 5)
    d = random_density(rng)
    return _sym_rows(i, random_cap_union(rng), d)


def _fixed_point_rows():
    rows = []
    for name, d in (("h=0", Density("constant", (0.0,), 0.0)), ("h=t^2", Density("power", (1.0, 2.0), 0.0))):
        half = Cap(CapProfile.from_nodes([0.0, 1.0], [math.pi / 2, math.pi / 2]), math.pi / 2)
        r = symmetrize(half, d)
        rows.append(_row("symmetrization", -1, "fixed-half-disk-perimeter", r.perimeter_after, r.perimeter_before, FIXED_TOL, equality=True, note=name))
        rows.append(_row("symmetrization", -1, "fixed-half-disk-volume", r.volume_after, r.volume_before, FIXED_TOL, equality=True, note=name))
        prof_err = float(np.max(np.abs(r.profile(np.linspace(0.0, 1.0, 101)[:-1]) - math.pi / 2)))
        rows.append(_row("symmetrization", -1, "fixed-half-disk-profile", prof_err, 0.0, FIXED_TOL, equality=True, note=name))
        r = symmetrize(CenteredBall(1.0), d)
        rows.append(_row("symmetrization", -1, "fixed-ball-perimeter", r.perimeter_after, r.perimeter_before, FIXED_TOL, equality=True, note=name))
        rows.append(_row("symmetrization", -1, "fixed-ball-volume", r.volume_after, r.volume_before, FIXED_TOL, equality=True, note=name))
    return rows


def run_symmetrization(n=DEFAULT_COUNTS["symmetrization"], seed=DEFAULT_SEED, density=None, a=None, b=None) -> SuiteResult:
    """Cap symmetrization of random multi-cap unions preserves volume and
    does not increase perimeter; half-disk and centred ball are fixed."""
    res = SuiteResult("symmetrization", seed, n)
    rows = _fixed_point_rows()
    if density is not None:

        def one(i):
            return _sym_rows(i, random_cap_union(instance_rng(seed, i, 5)), density)

        rows += _flatten(one(i) for i in range(n))
    else:
        rows += _flatten(_map(_sym_instance, [(seed, i) for i in range(n)]))
    res.rows = rows
    return res


# -- isoperimetric ------------------------------------------------------------------

PLATEAU = Density("piecewise-linear", (0.0, 1.0, 1.0), 0.0)


def _compete_rows(i, d, v, trials, cseed, Ns=(1, 2, 3)):
    rows = []
    for N in Ns:
        c = compete(d, v, N=N, trials=trials, seed=cseed)
        tag = f"N={N};seed={cseed};family={d.family}"
        rows.append(_row("isoperimetric", i, "ball-minimises", c.I, c.best_perimeter, GAP_TOL, note=tag))
        rows.append(_row("isoperimetric", i, "annuli-superadditivity", float(c.lemma_failures), 0.0, 0.0,
                         note=f"{tag};checks={c.lemma_checks};min_margin={c.min_lemma_margin:.3e}"))
        rows.append(_row("isoperimetric", i, "volume-constraint", c.max_volume_error, 0.0, VOLUME_TOL, note=tag))
    return rows


def _iso_instance(seed, i, trials):
    rng = instance_rng(seed, i, 6)
    d = random_density(rng)
    r = float(rng.uniform(0.3, 2.0))
    v = 2.0 * math.pi * float(build_kernel(d, (0.0, r)).G_max)
    cseed = int(rng.integers(0, 2**31 - 1))
    return _compete_rows(i, d, v, trials, cseed)


def _probe_rows():
    rows = []
    for v in (math.pi / 4, 4.0 * math.pi):
        p = uniqueness_probe(PLATEAU, v, tie_tol=TIE_TOL, strict_tol=STRICT_TOL)
        for r in p["rows"]:
            note = f"v={v:.15g};{r['competitor']};center={r['center']:.6g};{p['regime']}"
            if r["expect"] == "tie":
                rows.append(_row("isoperimetric", -1, "plateau-tie", r["perimeter"], p["I_f"], TIE_TOL, equality=True, note=note))
            else:
                rows.append(_row("isoperimetric", -1, "plateau-strict", STRICT_TOL, r["gap"], 0.0, note=note + f";{r['kind']}"))
    return rows


def run_isoperimetric(n=DEFAULT_COUNTS["isoperimetric"], seed=DEFAULT_SEED, density=None, a=None, b=None,
                      trials=32, v=None) -> SuiteResult:
    """
    Annuli competitions with ``N = 1, 2, 3`` on random convex densities at a
    random volume (ball radius uniform on [0.3, 2]), and the plateau
    uniqueness probe.
    """
    res = SuiteResult("isoperimetric", seed, n)
    rows = _probe_rows()
    if density is not None:
        if v is None:
            raise IsolabError("an isoperimetric run with a density needs --v")
        rows += _compete_rows(0, density, float(v), trials, seed)
        res.count = 1
    else:
        rows += _flatten(_map(_iso_instance, [(seed, i, trials) for i in range(n)]))
    res.rows = rows
    res.info["trials"] = trials
    return res


RUNNERS = {
    "hermite": run_hermite,
    "linear": run_linear,
    "riccati": run_riccati,
    "bvp": run_bvp,
    "symmetrization": run_symmetrization,
    "isoperimetric": run_isoperimetric,
}


def run_suite(name, n=None, seed=DEFAULT_SEED, **kw) -> SuiteResult:
    if name not in RUNNERS:
        raise IsolabError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    n = DEFAULT_COUNTS[name] if n is None else int(n)
    return RUNNERS[name](n=n, seed=seed, **kw)


__all__ = [
    "COLUMNS",
    "DEFAULT_COUNTS",
    "DEFAULT_SEED",
    "SUITES",
    "SuiteResult",
    "random_cap_union",
    "run_suite",
    "workers",
]
