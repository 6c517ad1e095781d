"""
Numerical companion for weighted isoperimetry in the plane with radial
log-convex densities ``f = exp(h(|x|))``.

Modules
-------
density       densities, step coefficients and the radial kernel g, G, J
means         mean quantities and their inequalities
bvp           closed-form boundary-value problems with shooting oracles
dist          distribution functions for dx/x and the comparison statements
geometry      shapes, weighted measures, cap symmetrization, curvature
isoperimetry  profile, annuli competitions and the plateau probe
suites        seeded verification suites
cli           command-line driver
"""

from .bvp import solve_linear, solve_origin, solve_riccati
from .density import Density, RadialKernel, RhoFunction, build_kernel, load_density
from .errors import (
    ConstructionError,
    DomainError,
    FeasibilityError,
    HypothesisError,
    IsolabError,
    LevelSetError,
    OverlapError,
    QuadratureError,
    SpecParseError,
)
from .isoperimetry import compete, profile_value, uniqueness_probe
from .means import compute_m, compute_mhat, verify_means

__version__ = "0.1.0"

__all__ = [
    "ConstructionError",
    "Density",
    "DomainError",
    "FeasibilityError",
    "HypothesisError",
    "IsolabError",
    "LevelSetError",
    "OverlapError",
    "QuadratureError",
    "RadialKernel",
    "RhoFunction",
    "SpecParseError",
    "build_kernel",
    "compete",
    "compute_m",
    "compute_mhat",
    "load_density",
    "profile_value",
    "solve_linear",
    "solve_origin",
    "solve_riccati",
    "uniqueness_probe",
    "verify_means",
]
