import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermiszego import determinantal as det
from fermiszego import schrodinger, testfunctions
from fermiszego.errors import NormTooLarge, SymbolTooLarge

from conftest import HARMONIC, QUARTIC, X

ONE = testfunctions.constant(1.0)
ZERO = testfunctions.constant(0.0)
BUMP = testfunctions.gaussian_bump(1.0, 0.3, 0.1)


def test_mean_trivial(harmonic_02):
    _, proj = harmonic_02
    np.testing.assert_allclose(det.linear_statistic_mean(proj, ONE), proj.N, atol=1e-10)
    assert det.linear_statistic_mean(proj, ZERO) == 0.0
    assert abs(det.linear_statistic_mean(proj, X)) < 1e-8


def test_variance_constant_is_zero(harmonic_02):
    _, proj = harmonic_02
    assert abs(det.exact_variance(proj, testfunctions.constant(2.5))) < 1e-10


def test_variance_harmonic_near_quarter(harmonic_02):
    _, proj = harmonic_02
    tr, comm = det.exact_variance(proj, X, return_forms=True)
    assert abs(tr - 0.25) < 0.02 * 0.25
    np.testing.assert_allclose(tr, comm, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(-2, 2), st.floats(-1, 1), st.floats(0.02, 1.0))
def test_variance_nonnegative_and_forms_agree(quartic_02, a, c, w):
    _, proj = quartic_02
    f = testfunctions.gaussian_bump(a, c, w)
    tr, comm = det.exact_variance(proj, f, return_forms=True)
    assert tr >= -1e-12
    np.testing.assert_allclose(tr, comm, atol=1e-11)


def test_log_laplace_trivial(harmonic_02):
    _, proj = harmonic_02
    assert det.log_laplace(proj, X, 0.0) == 0.0
    c, eta = 0.7, 0.3
    np.testing.assert_allclose(det.log_laplace(proj, testfunctions.constant(c), eta),
                               proj.N * eta * c, rtol=1e-12)


def test_log_laplace_complex_consistent(quartic_02):
    _, proj = quartic_02
    real = det.log_laplace(proj, BUMP, 0.2)
    cplx = det.log_laplace(proj, BUMP, 0.2 + 0j)
    np.testing.assert_allclose(cplx, real, atol=1e-12)
    z = det.log_laplace(proj, BUMP, 0.2j)
    np.testing.assert_allclose(det.log_laplace(proj, BUMP, -0.2j), np.conj(z), atol=1e-12)


def test_log_laplace_symbol_too_large(harmonic_02):
    _, proj = harmonic_02
    with pytest.raises(SymbolTooLarge):
        det.log_laplace(proj, X, 1.0)


def test_cumulants_constant(harmonic_02):
    _, proj = harmonic_02
    rep = det.cumulants(proj, testfunctions.constant(0.5))
    np.testing.assert_allclose(rep.kappa1, 0.5 * proj.N, rtol=1e-12)
    np.testing.assert_allclose([rep.kappa2_exact, rep.kappa3, rep.kappa4], 0.0, atol=1e-8)


def test_cumulants_harmonic(harmonic_02):
    _, proj = harmonic_02
    rep = det.cumulants(proj, X, name="x")
    assert abs(rep.kappa3) < 1e-3 and abs(rep.kappa4) < 1e-2
    assert abs(rep.kappa2_fd / rep.kappa2_exact - 1) < 1e-4
    assert rep.as_dict()["f_name"] == "x"


def test_cumulants_step_precondition(harmonic_02):
    _, proj = harmonic_02
    with pytest.raises(SymbolTooLarge):
        det.cumulants(proj, X, eta_step=0.3)


def test_szego_residual_harmonic(harmonic_02):
    _, proj = harmonic_02
    assert det.szego_residual(proj, X, 0.25) < 5e-3


def test_upsilon_commuting_operator_vanishes(harmonic_02):
    dec, proj = harmonic_02
    Phi = proj.columns
    A = 0.4 * Phi @ Phi.T * dec.grid.dx
    up = det.upsilon_coefficients(proj, A, n_max=8)
    np.testing.assert_allclose(up.raw, 0.0, atol=1e-12)


@pytest.mark.parametrize("eta", [-0.2, 0.15, 0.2])
def test_upsilon_series_reconstructs_log_laplace(quartic_02, eta):
    _, proj = quartic_02
    A = np.expm1(eta * BUMP(proj.grid.points))
    up = det.upsilon_coefficients(proj, A)
    target = det.log_laplace(proj, BUMP, eta) - eta * det.linear_statistic_mean(proj, BUMP)
    assert abs(up.series - target) < 1e-8
    assert up.bound_holds(8)


def test_upsilon_operator_path_matches_symbol_path():
    # full eigenbasis so the operator compression is exact
    g = schrodinger.build_grid(-2.2, 2.2, 120)
    H = schrodinger.discretize_hamiltonian(g, HARMONIC, 0.1)
    dec = schrodinger.eigendecompose(H, 1e9)
    proj = schrodinger.spectral_projector(dec, 1.0)
    a = np.expm1(0.2 * g.points)
    up1 = det.upsilon_coefficients(proj, a, n_max=8)
    up2 = det.upsilon_coefficients(proj, np.diag(a), n_max=8)
    np.testing.assert_allclose(up2.raw, up1.raw, atol=1e-12)
    np.testing.assert_allclose(up2.rho, np.max(np.abs(a)), rtol=1e-6)
    np.testing.assert_allclose(up2.commutator_hs2, up1.commutator_hs2, rtol=1e-9)


def test_upsilon_norm_too_large(harmonic_02):
    _, proj = harmonic_02
    with pytest.raises(NormTooLarge):
        det.upsilon_coefficients(proj, np.full(proj.grid.n, 1.2))


def test_matrix_elements_structure():
    dec, _ = schrodinger.solve(HARMONIC, 0.02, 1.0, box=(-2.2, 2.2), lambda_cap=1.5)
    me = det.matrix_elements(dec, X, (20, 30), band=2)
    assert me.hermiticity_residual < 1e-10
    assert me.off_band_max() < 1e-6
    sup = np.diag(me.entries, 1)
    # ladder operators: <j|x|j+1> = sqrt(hbar (j + 1) / 2), equal to 1/2 at j + 1 = N
    j = np.arange(20, 29)
    np.testing.assert_allclose(sup, np.sqrt(0.02 * (j + 1) / 2), atol=1e-3)
    np.testing.assert_allclose(sup[4], 0.5, atol=1e-3)
    np.testing.assert_allclose(np.diag(me.entries), 0.0, atol=1e-10)


def test_toeplitz_deviation_harmonic(harmonic_02):
    dec, _ = harmonic_02
    dev = det.toeplitz_deviation(dec, X, 1.0, V=HARMONIC)
    assert dev < 0.02


def test_toeplitz_gauge_matters(harmonic_02):
    dec, _ = harmonic_02
    raw = det.matrix_elements(dec, X, (20, 30), gauge=None).entries
    fixed = det.matrix_elements(dec, X, (20, 30)).entries
    np.testing.assert_allclose(np.abs(raw), np.abs(fixed), atol=1e-14)
    assert np.all(np.diag(fixed, 1) > 0)


def _dhk_fraction(t):
    n = len(t)
    lhs = Fraction(0)
    rhs = Fraction(0)
    for p in itertools.permutations(t):
        s = list(itertools.accumulate(p))
        lhs += max(s)
        rhs += sum(Fraction(abs(v), 2 * (r + 1)) for r, v in enumerate(s))
    return lhs, rhs


def test_dhk_hand_example():
    left, right = det.dhk_sides(np.array([[1, -1]]), 2)
    assert left[0] == right[0]
    lhs, rhs = _dhk_fraction((1, -1))
    assert lhs == rhs == 1


def test_dhk_zero_tuple():
    left, right = det.dhk_sides(np.zeros((1, 4), dtype=np.int64), 4)
    assert left[0] == 0 and right[0] == 0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_dhk_check_small(n):
    res = det.dhk_check(n, 3)
    assert res and res.n_tuples == len(det.zero_sum_tuples(n, 3))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4))
def test_dhk_kernel_matches_fraction_oracle(head):
    t = head + [-sum(head)]
    n = len(t)
    left, right = det.dhk_sides(np.array([t], dtype=np.int64), n)
    lhs, rhs = _dhk_fraction(tuple(t))
    assert lhs == rhs
    assert left[0] == right[0]
    # integer sides are the fraction sides scaled by 2 lcm(1..n)
    scale = 2 * np.lcm.reduce(np.arange(1, n + 1))
    assert int(right[0]) == rhs * scale


def test_counting_covariance_properties(harmonic_02):
    dec, proj = harmonic_02
    assert abs(det.counting_covariance(proj, 0.3, dec.grid.x_max)) < 1e-10
    assert det.counting_covariance(proj, 0.3, 0.3) >= 0
    np.testing.assert_allclose(det.counting_covariance(proj, 0.5, -0.5),
                               det.counting_covariance(proj, -0.5, 0.5), atol=1e-14)
