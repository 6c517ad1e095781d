"""
Mean-type ratios of ``g = x exp(h)`` on an interval and the direct/reverse
Hermite-Hadamard type bounds they satisfy.

``m = (g(b) - g(a)) / int g`` and ``mhat = (g(a) + g(b)) / int g``.  For a
vanishing coefficient they reduce to ``2/(a+b)`` and ``2/(b-a)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .density import RadialKernel, Window, build_kernel
from .errors import DomainError
from .quadrature import DEFAULT_TOL

EQUALITY_TOL = 1e-9

# statement ids carried by report rows
MEAN_LOWER = "mean-lower"
MEAN_UPPER = "mean-upper"
ENDMEAN_LOWER = "endpoint-mean-lower"
ENDMEAN_UPPER = "endpoint-mean-upper"


def interval_kernel(rho, a, b, eps=DEFAULT_TOL) -> RadialKernel:
    """Kernel of ``rho`` on ``[a, b]`` normalised by ``h(a) = 0``."""
    a, b = float(a), float(b)
    if not (0.0 <= a < b):
        raise DomainError(f"need 0 <= a < b, got a={a!r}, b={b!r}")
    return build_kernel(Window(rho, a, b), eps=eps)


def _ratios(k: RadialKernel):
    ga, gb = float(k.g(k.lo)), float(k.g(k.hi))
    total = k.G_max
    return ga, gb, total


def compute_m(rho, a, b, eps=DEFAULT_TOL) -> float:
    """``(g(b) - g(a)) / int_a^b g``."""
    ga, gb, total = _ratios(interval_kernel(rho, a, b, eps))
    return (gb - ga) / total


def compute_mhat(rho, a, b, eps=DEFAULT_TOL) -> float:
    """``(g(a) + g(b)) / int_a^b g``."""
    ga, gb, total = _ratios(interval_kernel(rho, a, b, eps))
    return (ga + gb) / total


def m_constant(lam, a, b) -> float:
    """
    Closed form of ``m`` for a constant coefficient ``lam > 0``.

    ``m(1, a, b) = (b e^b - a e^a) / ((b-1) e^b - (a-1) e^a)`` and
    ``m(lam, a, b) = lam m(1, lam a, lam b)``.
    """
    import math

    if lam == 0:
        return 2.0 / (a + b)
    A, B = lam * a, lam * b
    # scale by e^{-B} to keep the exponentials bounded
    ea = math.exp(A - B)
    num = B - A * ea
    den = (B - 1.0) - (A - 1.0) * ea
    return lam * num / den


@dataclass(frozen=True)
class MeansReport:
    """
    The four mean inequalities on one ``(rho, a, b)``.

    Margins are relative: ``(larger - smaller) / |larger|``; an inequality
    holds when its margin is ``>= -tol`` and is flagged as an equality when
    ``|margin| <= tol``.
    """

    a: float
    b: float
    m: float
    mhat: float
    m0: float
    mhat0: float
    rho_a: float
    rho_b: float
    bound83: float
    bound85: float
    margin_mean_lower: float
    margin_mean_upper: float
    margin_endmean_lower: float
    margin_endmean_upper: float
    tol: float
    rho_zero: bool

    def holds(self, which: str) -> bool:
        return getattr(self, f"margin_{which}") >= -self.tol

    def equality(self, which: str) -> bool:
        return abs(getattr(self, f"margin_{which}")) <= self.tol

    @property
    def all_hold(self) -> bool:
        return all(self.holds(w) for w in ("mean_lower", "mean_upper", "endmean_lower", "endmean_upper"))

    def rows(self):
        """One record per inequality, statement id first."""
        out = []
        for sid, key, lhs, rhs in (
            (MEAN_LOWER, "mean_lower", self.m0, self.m),
            (MEAN_UPPER, "mean_upper", self.m, self.bound83),
            (ENDMEAN_LOWER, "endmean_lower", self.mhat0, self.mhat),
            (ENDMEAN_UPPER, "endmean_upper", (self.b - self.a) * self.mhat, self.bound85),
        ):
            out.append(
                {
                    "statement": sid,
                    "a": self.a,
                    "b": self.b,
                    "lhs": lhs,
                    "rhs": rhs,
                    "margin": getattr(self, f"margin_{key}"),
                    "holds": self.holds(key),
                    "equality": self.equality(key),
                    "rho_zero": self.rho_zero,
                    "tol": self.tol,
                }
            )
        return out

    def to_record(self):
        rec = asdict(self)
        for key in ("mean_lower", "mean_upper", "endmean_lower", "endmean_upper"):
            rec[f"holds_{key}"] = self.holds(key)
            rec[f"equality_{key}"] = self.equality(key)
        return rec


def _margin(smaller, larger):
    return (larger - smaller) / abs(larger)


def verify_means(rho, a, b, tol=EQUALITY_TOL, eps=DEFAULT_TOL) -> MeansReport:
    """
    Evaluate ``m0 <= m``, ``m <= rho(b-) + 2/(a+b)``, ``mhat0 <= mhat`` and
    ``(b-a) mhat <= 2 + a rho(a+) + b rho(b-)``.
    """
    a, b = float(a), float(b)
    w = Window(rho, a, b)
    ga, gb, total = _ratios(build_kernel(w, eps=eps))
    m = (gb - ga) / total
    mhat = (ga + gb) / total
    m0 = 2.0 / (a + b)
    mhat0 = 2.0 / (b - a)
    ra, rb = w.rho_a, w.rho_b
    bound83 = rb + m0
    bound85 = 2.0 + a * ra + b * rb
    return MeansReport(
        a=a,
        b=b,
        m=m,
        mhat=mhat,
        m0=m0,
        mhat0=mhat0,
        rho_a=ra,
        rho_b=rb,
        bound83=bound83,
        bound85=bound85,
        margin_mean_lower=_margin(m0, m),
        margin_mean_upper=_margin(m, bound83),
        margin_endmean_lower=_margin(mhat0, mhat),
        margin_endmean_upper=_margin((b - a) * mhat, bound85),
        tol=float(tol),
        rho_zero=rb == 0.0,
    )
