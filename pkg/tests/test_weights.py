import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from fracphase.errors import NegativeWeight, NonNormalized
from fracphase.weights import (
    WeightFunction,
    beta_reflection,
    beta_weight,
    check_weight_admissible,
    gauss_jacobi_rule,
    linear_weight,
    named_weight,
    power_weight,
    tabulated_weight,
)

alphas = st.floats(0.05, 0.95)


def test_beta_reflection_matches_gamma():
    for a in (0.1, 0.3, 0.5, 0.77):
        assert beta_reflection(a) == pytest.approx(math.gamma(a) * math.gamma(1 - a), rel=1e-14)
    assert beta_reflection(0.5) == pytest.approx(math.pi)


@pytest.mark.parametrize("left,right", [(0.0, 0.0), (-0.5, -0.5), (-0.7, 0.0), (1.0, 0.0), (-0.3, -0.7)])
def test_gauss_jacobi_moments(left, right):
    theta, w = gauss_jacobi_rule(32, left, right)
    assert np.all((theta > 0) & (theta < 1))
    for p in range(5):
        exact = math.gamma(left + p + 1) * math.gamma(right + 1) / math.gamma(left + right + p + 2)
        assert np.sum(w * theta**p) == pytest.approx(exact, rel=1e-12)


def test_gauss_jacobi_rejects_bad_exponent():
    with pytest.raises(ValueError):
        gauss_jacobi_rule(8, -1.0, 0.0)


@settings(max_examples=40, deadline=None)
@given(alphas)
def test_weights_normalized(a):
    assert beta_weight(a).total_mass() == pytest.approx(1.0, abs=1e-10)
    assert power_weight(a).total_mass() == pytest.approx(1.0, abs=1e-10)
    assert linear_weight(a).total_mass() == pytest.approx(1.0, abs=1e-12)


def test_power_weight_matches_closed_form():
    w = power_weight(0.4)
    assert w(0.25) == pytest.approx(0.4 * 0.25 ** (0.4 - 1))
    # independent adaptive quadrature of the mass
    mass, _ = integrate.quad(lambda t: 0.4 * t ** (-0.6), 0, 1)
    assert mass == pytest.approx(1.0, rel=1e-8)


def test_beta_first_moment():
    # int theta omega = B(a+1, 1-a) / B(a, 1-a) = a
    for a in (0.2, 0.5, 0.9):
        assert beta_weight(a).integrate(lambda t: t) == pytest.approx(a, rel=1e-12)


def test_beta_and_power_weights_admissible():
    for a in np.arange(1, 10) / 10:
        b = check_weight_admissible(beta_weight(a))
        p = check_weight_admissible(power_weight(a))
        assert b.admissible and p.admissible
        assert -b.tolerance <= b.margin <= b.tolerance
        assert p.margin > 0


def test_beta_profile_constant():
    a = 0.35
    g = beta_weight(a).admissibility_profile(np.linspace(0.01, 0.99, 50))
    assert np.ptp(g) <= 1e-14
    assert g[0] == pytest.approx(1 / beta_reflection(a))


def test_linear_weight_rejected():
    res = check_weight_admissible(linear_weight(0.5))
    assert not res.admissible
    assert res.margin < 0
    theta = np.array([0.1, 0.2])
    assert np.allclose(linear_weight(0.5).admissibility_profile(theta), 2 * theta**1.5 * (1 - theta) ** 0.5)


def test_alpha_override():
    assert check_weight_admissible(beta_weight(0.5), alpha=0.5).admissible


def test_non_normalized_and_negative():
    doubled = WeightFunction("x", 0.5, lambda t: 2.0 * np.ones_like(t))
    with pytest.raises(NonNormalized):
        check_weight_admissible(doubled)
    signed = WeightFunction("s", 0.5, lambda t: 1.0 + 3.0 * np.cos(np.pi * t) * 0 + 6 * (t - 0.5))
    with pytest.raises(NegativeWeight):
        check_weight_admissible(signed)


def test_named_weight():
    assert named_weight("power", 0.3).kind == "power"
    with pytest.raises(ValueError):
        named_weight("gauss", 0.3)
    with pytest.raises(ValueError):
        beta_weight(1.0)


def test_tabulated_beta_matches_analytic():
    a = 0.5
    theta = np.linspace(0.0, 1.0, 11)
    reg = np.full_like(theta, 1 / beta_reflection(a))
    tab = tabulated_weight(a, theta, reg, left=a - 1, right=-a, name="tab")
    assert tab.total_mass() == pytest.approx(1.0, abs=1e-12)
    assert check_weight_admissible(tab).admissible
    with pytest.raises(ValueError):
        tabulated_weight(a, theta[::-1], reg)
