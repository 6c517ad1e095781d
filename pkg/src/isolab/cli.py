"""
Command-line driver.

Subcommands: ``profile``, ``compete``, ``ode``, ``verify`` and ``symmetrize``.
Floats are written with Python's shortest round-trip representation, CSV
with a header row and JSON as one single-line object per record, so equal
arguments give byte-identical output.

Exit codes: 0 success, 1 a verification failed (failing statement ids go to
stderr), 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import suites
from .bvp import central_derivative, residual_step, solve_linear, solve_origin, solve_riccati
from .density import load_density
from .errors import IsolabError
from .geometry import load_shape, symmetrize, symmetrize_raster
from .isoperimetry import compete, profile_value, write_trace

SUBCOMMANDS = ("profile", "compete", "ode", "verify", "symmetrize")
DEFAULT_SEED = suites.DEFAULT_SEED
GAP_TOL = suites.GAP_TOL


@dataclass
class RunConfig:
    subcommand: str
    density: str | None = None
    shape: str | None = None
    raster: str | None = None
    cell: float | None = None
    v: float | None = None
    a: float | None = None
    b: float | None = None
    eta: str = "1,-1"
    N: int = 1
    trials: int | None = None
    nm_trials: int = 32
    seed: int = DEFAULT_SEED
    tol: float | None = None
    suite: str | None = None
    points: int = 201
    out: str | None = None
    format: str = "csv"
    trace: str | None = None
    summary: str | None = None


# -- argument parsing -------------------------------------------------------------


def _positive(name, kind=float):
    def conv(text):
        try:
            val = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"malformed number {text!r}") from None
        if not (val > 0) or (kind is float and not math.isfinite(val)):
            raise argparse.ArgumentTypeError(f"{name} must be positive")
        return val

    return conv


def _nonneg_float(name):
    def conv(text):
        try:
            val = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"malformed number {text!r}") from None
        if not (val >= 0) or not math.isfinite(val):
            raise argparse.ArgumentTypeError(f"{name} must be >= 0")
        return val

    return conv


ETA_CHOICES = ("1,1", "1,-1", "-1,-1", "-1,1", "riccati", "origin")


def _eta(text):
    t = text.replace(" ", "").strip("()")
    if t not in ETA_CHOICES:
        raise argparse.ArgumentTypeError(f"eta must be one of {', '.join(ETA_CHOICES)}")
    return t


_RANDOM_HELP = (
    "Random coefficients are nonnegative nondecreasing step functions with up to 8 "
    "jumps at uniform positions and exponentially distributed increments."
)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="isolab",
        description="Weighted isoperimetry with radial log-convex densities: profiles, "
        "competitor searches, boundary-value problems and verification suites.",
        epilog=f"Default seed: {DEFAULT_SEED}. ISOLAB_THREADS sets the number of worker processes.",
    )
    sub = p.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    def common(sp, density_required=False):
        sp.add_argument("--density", required=density_required, help="density file (family/params/h0)")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--summary", help="also write a one-line JSON summary here")

    sp = sub.add_parser("profile", help="isoperimetric profile I_f(v) and ball radius")
    common(sp, True)
    sp.add_argument("--v", type=_positive("v"), required=True, help="weighted volume")

    sp = sub.add_parser("compete", help="best union of N centred annuli against the ball")
    common(sp, True)
    sp.add_argument("--v", type=_positive("v"), required=True)
    sp.add_argument("--N", type=_positive("N", int), default=1, help="number of annuli")
    sp.add_argument("--trials", type=_positive("trials", int), default=32, help="multi-start count")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--tol", type=_positive("tol"), default=GAP_TOL, help="allowed negative gap")
    sp.add_argument("--trace", help="CSV file for every evaluated configuration")

    sp = sub.add_parser("ode", help="closed-form boundary-value solution on a grid")
    common(sp, True)
    sp.add_argument("--a", type=_nonneg_float("a"), help="left end (0 or omitted for the origin problem)")
    sp.add_argument("--b", type=_positive("b"), required=True)
    sp.add_argument("--eta", type=_eta, default="1,-1", help="sign pattern, 'riccati' or 'origin'")
    sp.add_argument("--points", type=_positive("points", int), default=201)
    sp.add_argument("--tol", type=_positive("tol"), default=suites.RESIDUAL_TOL, help="residual tolerance")

    sp = sub.add_parser("verify", help="run a verification suite", description=_RANDOM_HELP)
    common(sp)
    sp.add_argument("--suite", choices=suites.SUITES, required=True)
    sp.add_argument("--trials", type=_positive("trials", int), help="number of random instances")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--a", type=_nonneg_float("a"), help="single-instance interval (with --density)")
    sp.add_argument("--b", type=_positive("b"))
    sp.add_argument("--v", type=_positive("v"), help="volume for the isoperimetric suite with --density")
    sp.add_argument("--nm-trials", dest="nm_trials", type=_positive("nm-trials", int), default=32,
                    help="multi-start count per competition (isoperimetric suite)")

    sp = sub.add_parser("symmetrize", help="cap symmetral of a shape or raster")
    common(sp, True)
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--shape", help="JSON list of components")
    src.add_argument("--raster", help="0/1 grid (.npy or whitespace text)")
    sp.add_argument("--cell", type=_positive("cell"), help="raster cell size")
    return p


def parse_args(argv) -> RunConfig:
    """Validated :class:`RunConfig`; exits with status 2 and a usage message on bad input."""
    parser = build_parser()
    ns = parser.parse_args(list(argv))
    cfg = RunConfig(**{k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__})
    if cfg.subcommand == "symmetrize" and cfg.raster and cfg.cell is None:
        parser.error("argument --cell: required with --raster")
    if cfg.subcommand == "ode" and cfg.a is not None and cfg.a > 0 and cfg.a >= cfg.b:
        parser.error("argument --a: a must be smaller than b")
    if cfg.subcommand == "ode" and cfg.eta == "origin" and cfg.a not in (None, 0.0):
        parser.error("argument --a: the origin problem lives on [0, b]")
    if cfg.subcommand == "ode" and cfg.eta != "origin" and not cfg.a:
        parser.error("argument --a: required and positive unless --eta origin")
    if cfg.subcommand == "verify" and (cfg.a is None) != (cfg.b is None):
        parser.error("argument --a/--b: give both or neither")
    if cfg.subcommand == "verify" and cfg.a is not None and cfg.density is None:
        parser.error("argument --density: required with --a/--b")
    return cfg


# -- output -------------------------------------------------------------------------


def _scalar(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {str(k): _scalar(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_scalar(v) for v in x]
    return x


def _cell(x):
    x = _scalar(x)
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, list):
        return json.dumps(x, separators=(",", ":"))
    return str(x)


def json_line(rec) -> str:
    return json.dumps(_scalar(rec), separators=(",", ":"), sort_keys=False) + "\n"


def csv_text(columns, rows, comment=None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _emit(cfg: RunConfig, text: str):
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_summary(cfg: RunConfig, rec):
    if cfg.summary:
        with open(cfg.summary, "w", encoding="utf-8", newline="") as fh:
            fh.write(json_line(rec))


def _record_output(cfg, rec):
    """A single flat record: one CSV row or one JSON line."""
    if cfg.format == "json":
        _emit(cfg, json_line(rec))
    else:
        _emit(cfg, csv_text(list(rec), [rec]))
    _emit_summary(cfg, rec)


# -- subcommands --------------------------------------------------------------------


def _cmd_profile(cfg):
    d = load_density(cfg.density)
    r, I = profile_value(d, cfg.v)
    _record_output(cfg, {"v": cfg.v, "r": r, "I_f": I, **{f"density_{k}": v for k, v in d.to_record().items()}})
    return 0


def _cmd_compete(cfg):
    d = load_density(cfg.density)
    res = compete(d, cfg.v, N=cfg.N, trials=cfg.trials, seed=cfg.seed, keep_trace=bool(cfg.trace))
    rec = res.to_record()
    ok_gap = res.gap >= -cfg.tol
    ok = ok_gap and res.lemma_failures == 0
    rec.update(tol=cfg.tol, passed=ok)
    _record_output(cfg, rec)
    if cfg.trace:
        write_trace(cfg.trace, res)
    if not ok:
        ids = [s for s, bad in (("ball-minimises", not ok_gap), ("annuli-superadditivity", res.lemma_failures > 0)) if bad]
        print(f"FAIL {' '.join(ids)}", file=sys.stderr)
        return 1
    return 0


def _fd_residuals(sol, t, step):
    """Seven-point residual where the stencil stays in one smooth panel, else ``None``."""
    fn = sol.w if hasattr(sol, "w") else sol.u
    out = [None] * t.size
    edges = np.array([sol.a, *sol.breaks, sol.b])
    ok = np.ones(t.size, dtype=bool)
    for e in edges:
        ok &= np.abs(t - e) > 4.0 * step
    x = t[ok]
    if x.size:
        res = np.abs(sol.residual(x, central_derivative(fn, x, step)))
        for j, r in zip(np.nonzero(ok)[0], res):
            out[j] = float(r)
    return out


def _cmd_ode(cfg):
    d = load_density(cfg.density)
    if cfg.eta == "origin":
        sol, a, label = solve_origin(d, cfg.b), 0.0, "u"
    elif cfg.eta == "riccati":
        sol, a, label = solve_riccati(d, cfg.a, cfg.b), cfg.a, "w"
    else:
        eta = tuple(int(e) for e in cfg.eta.split(","))
        sol, a, label = solve_linear(d, cfg.a, cfg.b, eta), cfg.a, "u"
    t = np.linspace(a, cfg.b, cfg.points)
    vals = np.asarray(sol.w(t) if label == "w" else sol.u(t), dtype=float)
    res = _fd_residuals(sol, t, residual_step(sol))
    worst = max((r for r in res if r is not None), default=0.0)
    meta = {"lam": sol.lam, "eta": cfg.eta, "a": a, "b": cfg.b, "residual_max": worst, "tol": cfg.tol}
    if cfg.format == "json":
        _emit(cfg, json_line({**meta, "t": t.tolist(), label: vals.tolist(), "residual": res}))
    else:
        comment = ", ".join(f"{k}={_cell(v)}" for k, v in meta.items())
        rows = [{"t": x, label: y, "residual": r} for x, y, r in zip(t, vals, res)]
        _emit(cfg, csv_text(["t", label, "residual"], rows, comment=comment))
    _emit_summary(cfg, meta)
    if worst > cfg.tol:
        print(f"FAIL {'riccati' if label == 'w' else 'linear'}-residual {worst!r} > {cfg.tol!r}", file=sys.stderr)
        return 1
    return 0


def _cmd_verify(cfg):
    d = load_density(cfg.density) if cfg.density else None
    kw = {"density": d, "a": cfg.a, "b": cfg.b}
    if cfg.suite == "isoperimetric":
        kw.update(trials=cfg.nm_trials, v=cfg.v)
    res = suites.run_suite(cfg.suite, n=cfg.trials, seed=cfg.seed, **kw)
    summary = res.summary()
    if cfg.format == "json":
        _emit(cfg, "".join(json_line(r) for r in res.checks) + json_line(summary))
    else:
        _emit(cfg, csv_text(suites.COLUMNS, res.rows))
    _emit_summary(cfg, summary)
    if not res.passed:
        print(f"FAIL suite={res.suite} statements: {' '.join(res.failing_statements)}", file=sys.stderr)
        return 1
    eq = summary.get("equality_cases")
    extra = f" equality_cases={eq}" if eq is not None else ""
    print(f"PASS suite={res.suite} checks={len(res.checks)}{extra}", file=sys.stderr)
    return 0


def _load_raster(path):
    if str(path).endswith(".npy"):
        arr = np.load(path)
    else:
        arr = np.loadtxt(path)
    return np.asarray(arr) > 0.5


def _cmd_symmetrize(cfg):
    d = load_density(cfg.density)
    if cfg.raster:
        res = symmetrize_raster(_load_raster(cfg.raster), cfg.cell, d)
    else:
        res = symmetrize(load_shape(cfg.shape), d)
    vol_ok = abs(res.volume_after - res.volume_before) <= res.eps_disc
    per_ok = res.perimeter_after <= res.perimeter_before + res.eps_disc
    meta = {
        "perimeter_before": res.perimeter_before,
        "perimeter_after": res.perimeter_after,
        "volume_before": res.volume_before,
        "volume_after": res.volume_after,
        "eps_disc": res.eps_disc,
        "passed": vol_ok and per_ok,
    }
    tau, L_left, L_right = res.L_table()
    if cfg.format == "json":
        _emit(cfg, json_line({**meta, "tau": tau, "L_left": L_left, "L_right": L_right}))
    else:
        rows = [{"tau": x, "L_left": l, "L_right": r} for x, l, r in zip(tau, L_left, L_right)]
        comment = ", ".join(f"{k}={_cell(v)}" for k, v in meta.items())
        _emit(cfg, csv_text(["tau", "L_left", "L_right"], rows, comment=comment))
    _emit_summary(cfg, meta)
    if not meta["passed"]:
        ids = [s for s, bad in (("symmetral-volume", not vol_ok), ("symmetral-perimeter", not per_ok)) if bad]
        print(f"FAIL {' '.join(ids)}", file=sys.stderr)
        return 1
    return 0


_COMMANDS = {
    "profile": _cmd_profile,
    "compete": _cmd_compete,
    "ode": _cmd_ode,
    "verify": _cmd_verify,
    "symmetrize": _cmd_symmetrize,
}


def run(cfg: RunConfig) -> int:
    """Execute ``cfg``; returns the exit code."""
    try:
        return _COMMANDS[cfg.subcommand](cfg)
    except (IsolabError, OSError, ValueError) as exc:
        print(f"isolab {cfg.subcommand}: error: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
