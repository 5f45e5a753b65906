import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erfcx

from fracphase import TimeGrid, caputo_derivative_series, l1_weights, mittag_leffler
from fracphase.errors import LengthMismatch, OutOfRange
from oracles import ml_half_negative, observed_orders


def caputo_power(p, alpha, t):
    """Exact Caputo derivative of ``t^p``."""
    return math.gamma(p + 1) / math.gamma(p + 1 - alpha) * t ** (p - alpha)


def test_time_grid_nodes():
    g = TimeGrid(2.0, 4)
    assert np.allclose(g.nodes, [0, 0.5, 1, 1.5, 2])
    assert g.uniform
    gg = TimeGrid.graded(1.0, 4, 0.5)
    assert gg.grading == pytest.approx(3.0)
    assert np.allclose(gg.nodes, (np.arange(5) / 4) ** 3)
    assert gg.nodes[-1] == 1.0
    with pytest.raises(ValueError):
        gg.nodes[1] = 0.0
    with pytest.raises(ValueError):
        TimeGrid(1.0, 0)
    with pytest.raises(ValueError):
        TimeGrid(-1.0, 4)


def test_l1_single_step():
    g = TimeGrid(1.0, 10)
    a = l1_weights(0.5, g, 1)
    assert a[0] == pytest.approx(0.1**-0.5 / math.gamma(1.5))


def test_l1_backward_euler_limit():
    g = TimeGrid(1.0, 8)
    a = l1_weights(1 - 1e-9, g, 5)
    assert a[-1] == pytest.approx(8.0, rel=1e-6)
    assert np.max(np.abs(a[:-1])) < 1e-6


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.95), st.integers(1, 200), st.floats(0.1, 10))
def test_l1_telescope_uniform(alpha, n_steps, T):
    g = TimeGrid(T, n_steps)
    n = n_steps
    a = l1_weights(alpha, g, n)
    assert np.all(a > 0)
    total = np.sum(a * g.steps[:n]) * math.gamma(2 - alpha)
    assert total == pytest.approx(T ** (1 - alpha), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(-5, 5), st.sampled_from([1.0, 2.0, 3.5]))
def test_caputo_of_constant(alpha, c, r):
    g = TimeGrid(1.0, 64, r)
    assert np.max(np.abs(caputo_derivative_series(np.full(65, c), alpha, g))) <= 1e-14


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("r", [1.0, 2.0])
def test_caputo_exact_on_linear(alpha, r):
    g = TimeGrid(1.0, 100, r)
    t = g.nodes
    d = caputo_derivative_series(3 * t + 1, alpha, g)
    exact = 3 * t ** (1 - alpha) / math.gamma(2 - alpha)
    assert np.max(np.abs(d - exact)) <= 1e-12


def test_caputo_vector_samples():
    g = TimeGrid(1.0, 16)
    t = g.nodes
    u = np.stack([t, 2 * t], axis=1)
    d = caputo_derivative_series(u, 0.4, g)
    assert d.shape == (17, 2)
    assert np.allclose(d[:, 1], 2 * d[:, 0])


def test_caputo_length_mismatch():
    with pytest.raises(LengthMismatch):
        caputo_derivative_series(np.zeros(5), 0.5, TimeGrid(1.0, 8))


def test_caputo_quadratic_order():
    errs = []
    for N in (128, 256, 512, 1024):
        g = TimeGrid(1.0, N)
        d = caputo_derivative_series(g.nodes**2, 0.5, g)
        errs.append(np.max(np.abs(d - caputo_power(2, 0.5, g.nodes))))
    assert np.min(observed_orders(errs)) >= 1.4


@pytest.mark.parametrize("x", [0.0, 0.1, 0.5, 1.0, 2.0, 3.0])
def test_mittag_leffler_half_small(x):
    assert mittag_leffler(0.5, -x) == pytest.approx(ml_half_negative(x), rel=1e-13)


@pytest.mark.parametrize("x", [5.0, 10.0, 25.0, 50.0])
def test_mittag_leffler_half_large(x):
    assert mittag_leffler(0.5, -x) == pytest.approx(erfcx(x), rel=1e-12)


def test_mittag_leffler_anchor():
    assert mittag_leffler(0.5, -1.0) == pytest.approx(math.e * math.erfc(1.0), rel=1e-14)
    assert mittag_leffler(0.5, -1.0) == pytest.approx(0.42758, abs=1e-5)


@pytest.mark.parametrize("z", [-0.5, -3.0, -20.0, -50.0])
def test_mittag_leffler_exponential(z):
    assert mittag_leffler(1.0, z) == pytest.approx(math.exp(z), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 1.0), st.floats(-50, 0))
def test_mittag_leffler_completely_monotone_bounds(alpha, z):
    v = mittag_leffler(alpha, z)
    assert 0 < v <= 1.0 + 1e-15


def test_mittag_leffler_domain():
    with pytest.raises(OutOfRange):
        mittag_leffler(0.5, 1.0)
    with pytest.raises(OutOfRange):
        mittag_leffler(0.5, -51.0)
    with pytest.raises(OutOfRange):
        mittag_leffler(0.0, -1.0)


@pytest.mark.parametrize("alpha,x", [(0.3, 3.0), (0.7, 8.0), (0.5, 2.0), (0.9, 6.0)])
def test_mittag_leffler_integral_path_matches_series(alpha, x):
    from fracphase.caputo import _ml_integral, _ml_series_mp

    assert _ml_integral(alpha, x) == pytest.approx(_ml_series_mp(alpha, -x, 60), rel=1e-12)
