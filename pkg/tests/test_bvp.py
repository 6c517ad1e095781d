import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isolab.bvp import (
    residual_check,
    shoot_linear,
    shoot_origin,
    shoot_riccati,
    solve_linear,
    solve_origin,
    solve_riccati,
)
from isolab.density import Density, RhoFunction
from isolab.dist import u0, w0, w0_sup
from isolab.errors import DomainError
from isolab.sampling import random_step_rho

STEP_RHO = RhoFunction.step(2.0, 5.0, [3.0, 4.0], [0.0, 0.1, 0.25])
# frozen from a 30-digit mpmath computation: zero of the (1, -1) solution
STEP_U_ZERO = 3.0361339109637897674
RIC_RHO = RhoFunction.step(1.0, 3.0, [2.0], [0.0, 0.2])
RIC_LAM = 0.62161115714229049094
RIC_SUP = 1.0803257429964045404
RIC_ARGMAX = 1.4891089507982093273

ETAS = [(1, 1), (1, -1), (-1, -1), (-1, 1)]


@pytest.mark.parametrize("eta", ETAS)
def test_boundary_values_and_residual(eta):
    sol = solve_linear(STEP_RHO, 2.0, 5.0, eta)
    assert float(sol(2.0)) == pytest.approx(eta[0], abs=1e-13)
    assert float(sol(5.0)) == pytest.approx(eta[1], abs=1e-12)
    assert sol.residual_max <= 1e-7


@pytest.mark.parametrize("eta", ETAS)
def test_closed_form_matches_shooting(eta):
    sol = solve_linear(STEP_RHO, 2.0, 5.0, eta)
    assert abs(sol.lam - shoot_linear(STEP_RHO, 2.0, 5.0, eta)) <= 1e-7


def test_sign_patterns_are_negatives():
    for e1, e2 in ((1, 1), (1, -1)):
        p = solve_linear(STEP_RHO, 2.0, 5.0, (e1, e2))
        q = solve_linear(STEP_RHO, 2.0, 5.0, (-e1, -e2))
        x = np.linspace(2.0, 5.0, 9)
        assert np.allclose(p(x), -np.asarray(q(x)), atol=1e-14)
        assert p.lam == -q.lam


def test_zero_coefficient_linear_closed_form():
    a, b = 1.0, 3.0
    sol = solve_linear(RhoFunction.constant(a, b, 0.0), a, b, (1, -1))
    x = np.linspace(a, b, 21)
    assert np.allclose(sol(x), u0(x, a, b), atol=1e-13)
    assert sol.c == pytest.approx(math.sqrt(a * b), abs=1e-12)


def test_zero_crossing_frozen():
    sol = solve_linear(STEP_RHO, 2.0, 5.0, (1, -1))
    assert abs(sol.c - STEP_U_ZERO) < 1e-10


def test_riccati_zero_coefficient_closed_form():
    a, b = 1.0, 3.0
    sol = solve_riccati(RhoFunction.constant(a, b, 0.0), a, b)
    x = np.linspace(a, b, 21)
    assert np.allclose(sol(x), w0(x, a, b), atol=1e-13)
    assert abs(sol.sup_w - w0_sup(a, b)) < 1e-12
    assert abs(sol.argmax - math.sqrt(a * b)) < 1e-7


def test_riccati_step_frozen():
    sol = solve_riccati(RIC_RHO, 1.0, 3.0)
    assert abs(sol.lam - RIC_LAM) < 1e-12
    assert abs(sol.sup_w - RIC_SUP) < 1e-12
    assert abs(sol.argmax - RIC_ARGMAX) < 1e-6
    assert abs(sol.lam - shoot_riccati(RIC_RHO, 1.0, 3.0)) <= 1e-7
    assert sol.residual_max <= 1e-7


def test_origin_zero_coefficient():
    # g = x, G = x^2/2: u = x / b and lam = -2/b
    b = 2.0
    sol = solve_origin(RhoFunction.constant(0.0, b, 0.0), b)
    x = np.linspace(0.0, b, 11)
    assert np.allclose(sol(x), x / b, atol=1e-14)
    assert sol.lam == pytest.approx(-2.0 / b, rel=1e-14)


def test_origin_with_density_and_shooting():
    d = Density("piecewise-linear", (0.0, 1.0, 1.0))
    sol = solve_origin(d, 2.0)
    assert float(sol(2.0)) == pytest.approx(1.0, abs=1e-13)
    assert sol.residual_max <= 1e-7
    assert abs(sol.lam - shoot_origin(d, 2.0)) <= 1e-7


def test_invalid_inputs():
    with pytest.raises(DomainError):
        solve_linear(RhoFunction.constant(0.0, 1.0, 0.0), 0.0, 1.0)
    with pytest.raises(ValueError):
        solve_linear(STEP_RHO, 2.0, 5.0, (1, 0))
    with pytest.raises(DomainError):
        solve_origin(RhoFunction.constant(0.0, 1.0, 0.0), 0.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 9.0), st.floats(0.01, 4.0), st.sampled_from(ETAS))
def test_random_linear_residual_and_shooting(seed, a, length, eta):
    b = min(a + length, 10.0)
    if b - a < 1e-2:
        return
    rng = np.random.default_rng(seed)
    rho = random_step_rho(rng, a, b, scale=1.0 / (b - a))
    sol = solve_linear(rho, a, b, eta)
    # rounding in u leaves a floor of about 1e-11 relative to the O(lam) terms
    assert residual_check(sol) <= 1e-7 * max(1.0, abs(sol.lam))
    assert abs(sol.lam - shoot_linear(rho, a, b, eta)) <= 1e-7 * max(1.0, abs(sol.lam))
