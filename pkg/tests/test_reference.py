import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermiszego import classical, reference, testfunctions

from conftest import HARMONIC, X


def test_log_det_trivial_symbols():
    zero = reference.CircleSymbol(np.zeros(1, dtype=complex))
    assert abs(reference.toeplitz_log_det(zero, 40)) < 1e-13
    c = reference.CircleSymbol(np.array([0.3 + 0j]))
    np.testing.assert_allclose(reference.toeplitz_log_det(c, 40), 40 * 0.3, rtol=1e-13)


def test_szego_rhs_values():
    assert reference.szego_rhs(reference.CircleSymbol(np.array([2.0 + 0j]))) == 0.0
    np.testing.assert_allclose(reference.szego_rhs(reference.CircleSymbol.cosine(2.0, 1)), 1.0,
                               atol=1e-15)
    np.testing.assert_allclose(reference.szego_rhs(reference.CircleSymbol.cosine(1.0, 2)), 0.5,
                               atol=1e-15)


def test_strong_szego_cosine():
    sym = reference.CircleSymbol.cosine(2.0, 1)
    assert abs(reference.szego_residual(sym, 256)) < 1e-6


def test_strong_szego_log_symbol_decreasing():
    sym = reference.log_symbol(0.97, 0.5)
    res = [abs(reference.szego_residual(sym, N)) for N in (32, 64, 128, 256)]
    assert all(b < a for a, b in zip(res, res[1:]))


def test_log_symbol_closed_form():
    sym = reference.log_symbol(0.8, 0.5)
    th = np.linspace(0, 2 * np.pi, 17)
    np.testing.assert_allclose(np.exp(sym(th)), np.abs(1 - 0.8 * np.exp(1j * th)) ** -1.0,
                               rtol=1e-12)


def test_from_function_recovers_coefficients():
    sym = reference.CircleSymbol.from_function(lambda t: 2 * np.cos(t) + 0.5 * np.sin(3 * t), K=8)
    np.testing.assert_allclose([sym[1], sym[-1]], [1.0, 1.0], atol=1e-14)
    np.testing.assert_allclose([sym[3], sym[-3]], [-0.25j, 0.25j], atol=1e-14)
    assert sym[20] == 0.0


@settings(max_examples=10, deadline=None)
@given(st.floats(-0.4, 0.4), st.floats(-0.4, 0.4), st.integers(4, 40))
def test_cue_projector_matches_toeplitz(a, b, N):
    c = np.array([b / 2, a / 2, 0.1, a / 2, b / 2], dtype=complex)
    sym = reference.CircleSymbol(c)
    np.testing.assert_allclose(reference.cue_log_laplace(sym, N),
                               reference.toeplitz_log_det(sym, N), atol=1e-11)


def test_gue_chebyshev_variance():
    np.testing.assert_allclose(reference.gue_chebyshev_variance(X), 0.25, atol=1e-14)
    assert abs(reference.gue_chebyshev_variance(testfunctions.constant(3.0))) < 1e-20


def test_gue_matches_flow_fourier():
    f = testfunctions.gaussian_bump(1.0, 0.2, 0.3)
    np.testing.assert_allclose(reference.gue_chebyshev_variance(f),
                               classical.predicted_variance_fourier(f, HARMONIC, 1.0),
                               atol=1e-10)
