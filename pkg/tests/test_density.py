import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as spi

from isolab.density import (
    Density,
    RadialKernel,
    RhoFunction,
    build_kernel,
    format_density,
    kernel_covering,
    parse_density_text,
)
from isolab.errors import ConstructionError, DomainError, SpecParseError
from isolab.isoperimetry import profile_value

# frozen values from an independent 30-digit mpmath computation
G_POWER_AT_1_7 = 5.1496947045719086092  # h = 0.3 + 0.7 t^1.5, int_0^1.7 t e^h
PL_RADIUS_AT_5 = 1.1373823768102837749  # slopes 0.5 | 1.5 at t = 1, h0 = -0.2
PL_PROFILE_AT_5 = 11.854174607783702041


def test_families_h_values():
    assert Density("constant", (0.4,)).h(3.0) == pytest.approx(0.4)
    assert Density("linear", (2.0,), 1.0).h(1.5) == pytest.approx(4.0)
    assert Density("power", (1.0, 2.0), 0.0).h(3.0) == pytest.approx(9.0)
    d = Density("piecewise-linear", (0.0, 1.0, 1.0, 2.0, 3.0), 0.5)
    assert np.allclose(d.h([0.5, 1.5, 3.0]), [0.5, 1.0, 4.5])


def test_piecewise_rho_one_sided():
    d = Density("piecewise-linear", (0.0, 1.0, 1.0), 0.0)
    assert d.rho(1.0, "left") == 0.0
    assert d.rho(1.0, "right") == 1.0
    assert d.plateau_radius == pytest.approx(1.0)


@pytest.mark.parametrize(
    "family, params",
    [
        ("linear", (-1.0,)),
        ("power", (1.0, 0.5)),
        ("power", (-1.0, 2.0)),
        ("piecewise-linear", (1.0, 1.0, 0.5)),
        ("piecewise-linear", (0.0, 2.0, 1.0, 1.0, 2.0)),
        ("nope", ()),
    ],
)
def test_construction_rejects_invalid(family, params):
    with pytest.raises(ConstructionError):
        Density(family, params)


def test_kernel_closed_forms():
    # h = t^2: G(r) = (e^{r^2} - 1) / 2
    k = RadialKernel(Density("power", (1.0, 2.0)), 0.0, 2.0)
    r = np.array([0.3, 1.0, 1.7, 2.0])
    assert np.allclose(k.G(r), (np.exp(r * r) - 1) / 2, rtol=1e-12, atol=0)
    assert np.allclose(k.g(r), r * np.exp(r * r), rtol=1e-14)
    # h = t: G(r) = e^r (r - 1) + 1
    k = RadialKernel(Density("linear", (1.0,)), 0.0, 5.0)
    assert np.allclose(k.G(r), np.exp(r) * (r - 1) + 1, rtol=1e-12)


def test_kernel_power_density_frozen():
    k = RadialKernel(Density("power", (0.7, 1.5), 0.3), 0.0, 2.0)
    assert abs(float(k.G(1.7)) - G_POWER_AT_1_7) < 1e-10


def test_kernel_against_scipy_quad():
    d = Density("piecewise-linear", (0.2, 0.7, 0.9, 1.9, 2.5), -0.4)
    k = RadialKernel(d, 0.0, 3.0)
    for x in (0.5, 0.7, 1.3, 2.9):
        ref = spi.quad(lambda t: t * math.exp(float(d.h(t))), 0.0, x, points=[0.7, 1.9], epsabs=1e-13, epsrel=1e-13)[0]
        assert abs(float(k.G(x)) - ref) < 1e-11 * max(1.0, ref)


def test_profile_piecewise_frozen():
    d = Density("piecewise-linear", (0.5, 1.0, 1.5), -0.2)
    r, I = profile_value(d, 5.0)
    assert abs(r - PL_RADIUS_AT_5) < 1e-10
    assert abs(I - PL_PROFILE_AT_5) < 1e-9


def test_profile_linear_density_unit_radius():
    # h = t: G(1) = 1, so v = 2 pi gives r = 1 and I_f = 2 pi e
    r, I = profile_value(Density("linear", (1.0,)), 2 * math.pi)
    assert abs(r - 1.0) < 1e-12
    assert abs(I - 2 * math.pi * math.e) < 1e-10


def test_kernel_out_of_domain():
    k = RadialKernel(Density("constant", (0.0,)), 0.0, 1.0)
    with pytest.raises(DomainError):
        k.G(1.5)
    with pytest.raises(DomainError):
        k.G_inv(10.0)


def test_coefficient_kernel_normalised_at_left_end():
    rho = RhoFunction.step(1.0, 3.0, [2.0], [0.0, 1.0])
    k = build_kernel(rho)
    assert float(k.h(1.0)) == 0.0
    assert float(k.h(3.0)) == pytest.approx(1.0)
    # G(3) = int_1^2 t dt + int_2^3 t e^{t-2} dt = 3/2 + 2e - 1
    assert abs(k.G_max - (0.5 + 2 * math.e)) < 1e-12


def test_rho_function_rejects_decreasing():
    with pytest.raises(ConstructionError):
        RhoFunction.step(1.0, 3.0, [2.0], [1.0, 0.5])
    with pytest.raises(ConstructionError):
        RhoFunction.step(1.0, 3.0, [2.0], [-0.1, 0.5])


def test_density_text_round_trip():
    d = Density("piecewise-linear", (0.0, 1.0, 1.0), 0.25)
    assert parse_density_text(format_density(d)) == d
    txt = "# plateau\nfamily = power\nparams = [1, 2]\n"
    assert parse_density_text(txt) == Density("power", (1.0, 2.0), 0.0)


@pytest.mark.parametrize(
    "text, line, key",
    [
        ("family = power\nparams = [1, 2\n", 2, "params"),
        ("family = power\nfoo = 1\n", 2, "foo"),
        ("params = [1]\n", None, "family"),
        ("family = linear\nparams = [-1]\n", 2, "params"),
        ("family = linear\nh0 = abc\n", 2, "h0"),
    ],
)
def test_density_text_errors_name_location(text, line, key):
    with pytest.raises(SpecParseError) as exc:
        parse_density_text(text)
    assert exc.value.key == key
    assert exc.value.line == line


def _random_density(draw):
    fam = draw(st.sampled_from(["constant", "linear", "power", "piecewise-linear"]))
    h0 = draw(st.floats(-1.0, 1.0))
    if fam == "constant":
        return Density(fam, (h0,), h0)
    if fam == "linear":
        return Density(fam, (draw(st.floats(0.0, 2.0)),), h0)
    if fam == "power":
        return Density(fam, (draw(st.floats(0.0, 1.5)), draw(st.floats(1.0, 3.0))), h0)
    s0 = draw(st.floats(0.0, 1.0))
    t1 = draw(st.floats(0.1, 2.0))
    s1 = s0 + draw(st.floats(0.0, 2.0))
    return Density(fam, (s0, t1, s1), h0)


densities = st.composite(lambda draw: _random_density(draw))()


@settings(max_examples=40, deadline=None)
@given(densities, st.floats(1e-3, 50.0))
def test_inverse_round_trip(d, s):
    k = kernel_covering(d, s)
    x = float(k.G_inv(s))
    assert abs(float(k.G(x)) - s) <= 1e-12 * max(1.0, s)
    assert abs(k.G_inv_scalar(s) - x) <= 1e-12 * max(1.0, x)


@settings(max_examples=40, deadline=None)
@given(densities)
def test_G_increasing_and_J_consistent(d):
    k = RadialKernel(d, 0.0, 2.5)
    x = np.linspace(0.0, 2.5, 200)
    G = np.asarray(k.G(x))
    assert np.all(np.diff(G) > 0)
    s = G[1:]
    assert np.allclose(k.J(s), k.g(x[1:]), rtol=1e-11)
    # scalar fast paths agree with the vectorised ones
    assert np.allclose(k.G_fast(x[1:]), G[1:], rtol=1e-13)


@settings(max_examples=30, deadline=None)
@given(densities, st.floats(0.05, 2.0), st.floats(0.05, 2.0))
def test_J_superadditive_pairs(d, s1, s2):
    # J(s1) + J(s2) >= J(s1 + s2) for log-convex radial densities
    k = kernel_covering(d, s1 + s2)
    lhs = float(k.J(s1) + k.J(s2))
    rhs = float(k.J(s1 + s2))
    assert lhs >= rhs - 1e-12 * max(1.0, lhs)
