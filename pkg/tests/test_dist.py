import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isolab.bvp import solve_linear, solve_origin, solve_riccati
from isolab.density import RhoFunction
from isolab.dist import (
    compare_linear,
    compare_riccati,
    distribution_function,
    level_set_slope,
    mu_measure,
    mu_u0,
    omega,
    threshold_grid,
    u0,
    w0,
    weighted_integral,
    z0,
)
from isolab.errors import DomainError, HypothesisError
from isolab.sampling import random_step_rho

# frozen from a 30-digit mpmath computation
STEP_RHO = RhoFunction.step(2.0, 5.0, [3.0, 4.0], [0.0, 0.1, 0.25])
STEP_LINEAR_INTEGRAL = -0.16565008639156120798
STEP_MU_U_HALF = 0.20423334432042727064
RIC_RHO = RhoFunction.step(1.0, 3.0, [2.0], [0.0, 0.2])
RIC_INTEGRAL = 4.4083891937501213133
RIC_MU_W = 0.47953056920171062272  # mu({w > 1.05}), a single interval


def test_mu_measure():
    assert mu_measure([(1.0, math.e), (3.0, 6.0)]) == pytest.approx(1.0 + math.log(2.0))
    with pytest.raises(DomainError):
        mu_measure([(0.0, 1.0)])


def test_riccati_control_distribution_closed_form():
    a, b = 1.0, 3.0
    sol = solve_riccati(RhoFunction.constant(a, b, 0.0), a, b)
    t = np.linspace(1.0, 2.0 / math.sqrt(3.0), 21)[:-1]
    d = distribution_function(sol.w, a, b, t, [math.sqrt(a * b)])
    assert np.max(np.abs(d.values - z0(t, a, b))) <= 1e-8


def test_linear_control_distribution_closed_form():
    a, b = 1.0, 3.0
    t = threshold_grid(0.0, 1.0, 64)
    d = distribution_function(lambda x: u0(x, a, b), a, b, t)
    assert np.max(np.abs(d.values - mu_u0(t, a, b))) <= 1e-10


def test_super_level_intervals_match_measure():
    a, b = 1.0, 3.0
    t = np.array([1.01, 1.1])
    d = distribution_function(lambda x: w0(x, a, b), a, b, t, [math.sqrt(3.0)])
    for val, iv in zip(d.values, d.intervals):
        assert val == pytest.approx(mu_measure(iv), abs=1e-15)


def test_control_integrals():
    sol = solve_riccati(RhoFunction.constant(1.0, 3.0, 0.0), 1.0, 3.0)
    assert abs(weighted_integral("decreasing-singular", sol) - math.pi) <= 1e-8
    sol = solve_origin(RhoFunction.constant(0.0, 2.0, 0.0), 2.0)
    assert abs(weighted_integral("odd-increasing", sol) - math.pi / 2) <= 1e-8
    sol = solve_linear(RhoFunction.constant(1.0, 3.0, 0.0), 1.0, 3.0, (1, -1))
    assert abs(weighted_integral("odd-increasing", sol)) <= 2e-6


def test_step_coefficient_linear_frozen():
    sol = solve_linear(STEP_RHO, 2.0, 5.0, (1, -1))
    assert abs(weighted_integral("odd-increasing", sol) - STEP_LINEAR_INTEGRAL) <= 1e-9
    d = distribution_function(sol.u, 2.0, 5.0, [0.5], list(sol.breaks))
    assert abs(d.values[0] - STEP_MU_U_HALF) <= 1e-10


def test_step_coefficient_riccati_frozen():
    sol = solve_riccati(RIC_RHO, 1.0, 3.0)
    assert abs(weighted_integral("decreasing-singular", sol) - RIC_INTEGRAL) <= 1e-8
    d = distribution_function(sol.w, 1.0, 3.0, [1.05], [*sol.breaks, *sol.critical])
    assert abs(d.values[0] - RIC_MU_W) <= 1e-10


def test_linear_comparison_control_is_equality():
    rep = compare_linear(RhoFunction.constant(1.0, 3.0, 0.0), 1.0, 3.0)
    assert rep.passed
    assert rep.equality


def test_linear_comparison_step_coefficient():
    rep = compare_linear(STEP_RHO, 2.0, 5.0)
    assert rep.passed
    assert rep.extra["integral"] <= 1e-5
    assert rep.strict_window is not None


def test_riccati_comparisons_step_coefficient():
    dist, slope, sup = compare_riccati(RIC_RHO, 1.0, 3.0)
    assert dist.passed and slope.passed and sup.passed
    assert dist.extra["integral"] >= math.pi - 1e-5
    assert slope.extra["fd_discrepancy"] <= 1e-2


def test_riccati_slope_control_meets_ode():
    # for the zero coefficient mu_{w0} solves mu' = -(2/t) coth(mu/2)
    a, b = 1.0, 3.0
    sol = solve_riccati(RhoFunction.constant(a, b, 0.0), a, b)
    t = threshold_grid(1.0, sol.sup_w, 50)
    d = distribution_function(sol.w, a, b, t, [*sol.critical])
    assert np.allclose(level_set_slope(sol, d), -omega(t, z0(t, a, b)), rtol=1e-7)


def test_riccati_hypothesis_violation_raises():
    rho = RhoFunction.step(1.0, 3.0, [2.0], [0.0, 0.3])
    with pytest.raises(HypothesisError):
        compare_riccati(rho, 1.0, 3.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 8.0), st.floats(0.05, 2.0), st.floats(0.01, 3.0))
def test_linear_comparison_property(seed, a, length, s):
    b = min(a + length, 10.0)
    rho = random_step_rho(np.random.default_rng(seed), a, b, scale=s / (b - a))
    try:
        rep = compare_linear(rho, a, b, n=128)
    except HypothesisError:
        return
    assert rep.passed, rep.summary()
    assert rep.extra["integral"] <= 1e-5


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 8.0), st.floats(0.05, 2.0), st.floats(0.01, 1.0))
def test_riccati_comparison_property(seed, a, length, s):
    b = min(a + length, 10.0)
    rho = random_step_rho(np.random.default_rng(seed), a, b, scale=s / (b - a))
    try:
        dist, slope, sup = compare_riccati(rho, a, b, n=128)
    except HypothesisError:
        return
    assert dist.passed and slope.passed and sup.passed
    assert dist.extra["integral"] >= math.pi - 1e-5
