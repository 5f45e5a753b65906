import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracphase.errors import DiagonalSingularity, DomainViolation, PivotFailure, PropertyViolation
from fracphase.kernelcert import (
    abel_kernel,
    certify_scaled,
    check_p_properties,
    generate_p_matrix,
    kappa_energy,
    kappa_energy_matrix,
    kappa_weighted,
    kappa_weighted_matrix,
    monotone_cholesky,
    mu_energy_kernel,
    mu_weighted,
    mu_weighted_kernel,
    sample_kernel_matrix,
    separable_factor_kernel,
    verify_kernel_conditions,
)
from fracphase.weights import WeightFunction, beta_weight, power_weight
from oracles import jacobi_eigenvalues, textbook_cholesky

E1, E2 = math.exp(-1), math.exp(-2)
ABEL3 = np.array([[1, E1, E2], [E1, 1, E1], [E2, E1, 1]])


def test_p_properties_small_examples():
    rep = check_p_properties([[2, 1], [1, 3]])
    assert rep.all_hold and rep.p1_margin == 1 and rep.p2_margin == 2 and math.isinf(rep.p3_margin)
    assert rep.to_dict()["p3_margin"] is None
    bad = check_p_properties([[1, 2], [2, 1]])
    assert not bad.p1_holds and bad.p1_margin == -1
    assert check_p_properties(ABEL3).all_hold


def test_p2_is_strict():
    # equal neighbours along a row: P2 margin exactly zero fails
    rep = check_p_properties([[1.0, 1.0], [1.0, 1.0]])
    assert rep.p1_holds and not rep.p2_holds


def test_cholesky_2x2_by_hand():
    cert = monotone_cholesky([[4, 2], [2, 3]])
    assert np.allclose(cert.l_factor, [[2, 0], [1, math.sqrt(2)]], atol=1e-15)
    assert cert.q1_holds and cert.q2_holds and cert.valid


def test_abel_3x3_against_textbook_cholesky():
    cert = monotone_cholesky(ABEL3)
    assert np.allclose(cert.l_factor, textbook_cholesky(ABEL3), rtol=1e-12, atol=0)
    assert cert.min_pivot > 0 and cert.q2_holds
    assert cert.reconstruction_residual < 1e-15


def test_cholesky_rejects_structure_violation():
    with pytest.raises(PropertyViolation):
        monotone_cholesky([[1, 2], [2, 1]])
    # unchecked path still fails on the nonpositive pivot
    with pytest.raises(PivotFailure):
        monotone_cholesky([[1, 2], [2, 1]], check=False)


def test_entry_validation():
    with pytest.raises(ValueError):
        check_p_properties([[1, 0.5], [0.4, 1]])
    with pytest.raises(ValueError):
        check_p_properties([[1, -0.5], [-0.5, 1]])


def test_generate_p_matrix_examples():
    for seed in range(5):
        S = generate_p_matrix(2, seed)
        assert S[1, 0] <= S[0, 0] and S[1, 0] < S[1, 1]
    S = generate_p_matrix(8, 42)
    assert check_p_properties(S).all_hold
    assert jacobi_eigenvalues(S)[0] > 0


@pytest.mark.parametrize("seed", range(25))
def test_generated_matrices_match_textbook_cholesky(seed):
    n = 2 + seed % 7
    S = generate_p_matrix(n, seed)
    cert = monotone_cholesky(S)
    ref = textbook_cholesky(S)
    assert cert.valid
    assert np.max(np.abs(cert.l_factor - ref)) <= 1e-10 * np.max(np.abs(ref))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.01, 3.0), min_size=2, max_size=16), st.floats(0.1, 5.0))
def test_abel_on_sorted_points_certifies(gaps, scale):
    pts = np.cumsum(gaps)
    # keep the smallest entry well above the strict P2 tolerance
    if scale * (pts[-1] - pts[0]) > 20:
        pts = pts * 20 / (scale * (pts[-1] - pts[0]))
    S = sample_kernel_matrix(abel_kernel(scale), pts)
    assert check_p_properties(S).all_hold
    assert monotone_cholesky(S).valid


def test_kernel_conditions_abel():
    rep = verify_kernel_conditions(abel_kernel(), [0.0, 0.5, 1.2])
    assert rep.all_hold


def test_kernel_conditions_separable_fails_x_condition_but_is_pd():
    k = separable_factor_kernel(0.5)
    pts = [0.1, 0.3, 0.5, 0.7]
    rep = verify_kernel_conditions(k, pts)
    assert not rep.p1_holds
    S = np.array([[k(a, b) for b in pts] for a in pts])
    # rank one: PSD, never negative
    assert jacobi_eigenvalues(S)[0] > -1e-12


def test_mu_weighted_sign_conditions_and_closed_form():
    a = 0.5
    rep = verify_kernel_conditions(mu_weighted_kernel(a), [0.1, 0.3, 0.55, 0.8])
    assert rep.all_hold
    # closed-form partials of log mu = a[log th + log(1-eta) - log(th-eta)]
    th, eta = 0.7, 0.2
    m = mu_weighted(th, eta, a)
    d_th = a * m * (1 / th - 1 / (th - eta))
    d_eta = a * m * (-1 / (1 - eta) + 1 / (th - eta))
    assert d_th < 0 and d_eta > 0


def test_mu_energy_sign_conditions():
    assert verify_kernel_conditions(mu_energy_kernel(0.3, 1.0), [0.1, 0.3, 0.5, 0.7]).all_hold


def test_kernel_condition_domain_checks():
    with pytest.raises(DomainViolation):
        verify_kernel_conditions(mu_weighted_kernel(0.5), [0.0, 0.5])
    with pytest.raises(DomainViolation):
        verify_kernel_conditions(abel_kernel(), [0.0, 1e-7], h_fd=1e-7)


def test_kappa_values():
    one = WeightFunction("flat", 0.5, lambda t: np.ones_like(np.asarray(t, float)))
    assert kappa_weighted(0.6, 0.2, one, 0.5) == pytest.approx(0.6 / 0.4**0.5)
    assert kappa_energy(0.5, 0.25, 1.0, 0.5) == pytest.approx(1 / (0.5**0.5 * 0.25**0.5))
    with pytest.raises(DiagonalSingularity):
        kappa_weighted(0.4, 0.4, one, 0.5)
    with pytest.raises(DomainViolation):
        kappa_weighted(1.2, 0.4, one, 0.5)
    with pytest.raises(DomainViolation):
        kappa_energy(1.0, 0.4, 1.0, 0.5)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0.05, 0.95))
def test_kappa_symmetric(x, y, a):
    if abs(x - y) < 1e-6:
        return
    w = beta_weight(a)
    assert kappa_weighted(x, y, w, a) == kappa_weighted(y, x, w, a)
    assert kappa_energy(x, y, 1.0, a) == kappa_energy(y, x, 1.0, a)


def test_kappa_energy_matrix_certifies():
    pts = np.arange(1, 8) / 10
    K, c = kappa_energy_matrix(pts, 1.0, 0.3, shift=0.05)
    rep, cert = certify_scaled(K, c)
    assert rep.all_hold and cert.valid
    assert cert.reconstruction_residual <= 1e-12 * np.max(K)
    LK = cert.factor_of_input()
    assert np.allclose(LK @ LK.T, K, rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 16), st.integers(0, 10_000), st.sampled_from([0.2, 0.5, 0.8]),
       st.sampled_from(["beta", "power"]))
def test_kappa_weighted_pivots_positive(n, seed, a, kind):
    rng = np.random.default_rng(seed)
    pts = np.sort(rng.uniform(0.02, 0.95, n))
    if np.min(np.diff(pts)) < 1e-3:
        return
    w = beta_weight(a) if kind == "beta" else power_weight(a)
    shift = 0.5 * min(np.min(np.diff(pts)), 0.99 - pts[-1])
    K, c = kappa_weighted_matrix(pts, w, a, shift)
    _, cert = certify_scaled(K, c)
    assert cert.min_pivot > 0 and cert.valid
