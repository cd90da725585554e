import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermiszego.errors import ValidationError
from fermiszego.potentials import (
    Cutoff,
    PotentialSpec,
    minimum,
    smooth_step,
    sublevel_components,
)

from conftest import DOUBLE_WELL, HARMONIC, QUARTIC


def test_harmonic_value():
    assert HARMONIC(1.0) == 1.0


def test_double_well_value():
    assert DOUBLE_WELL(1.0) == 0.0


def test_perturbed_double_well_left_well():
    cut = Cutoff(0.01, -1.2, -0.2, 0.1)
    V = PotentialSpec("multicut_perturbed", (0.0, 0.0, -1.0, 0.0, 1.0), (cut,))
    x = -0.7
    assert V(x) == pytest.approx(x**4 - x**2 + 0.01, abs=1e-15)
    assert V(0.7) == pytest.approx(0.7**4 - 0.7**2, abs=1e-15)


@pytest.mark.parametrize("kind, coeffs", [("custom_polynomial", (0.0, 1.0)),
                                          ("custom_polynomial", (0.0, 0.0, -1.0)),
                                          ("bogus", ())])
def test_rejects_non_confining(kind, coeffs):
    with pytest.raises(ValidationError):
        PotentialSpec(kind, coeffs)


def test_perturbation_only_for_multicut():
    with pytest.raises(ValidationError):
        PotentialSpec("harmonic", (), (Cutoff(0.1, 0, 1, 0.1),))


@settings(max_examples=50, deadline=None)
@given(st.floats(-2.0, 2.0))
def test_derivative_matches_central_difference(x):
    cut = Cutoff(0.02, -1.0, -0.3, 0.15)
    V = PotentialSpec("multicut_perturbed", (0.1, 0.3, -1.0, 0.0, 1.0), (cut,))
    h = 1e-5
    fd = (V(x + h) - V(x - h)) / (2 * h)
    np.testing.assert_allclose(V.derivative(x), fd, rtol=1e-6, atol=1e-7)


@settings(max_examples=50, deadline=None)
@given(st.floats(-3.0, 3.0))
def test_smooth_step_range_and_symmetry(t):
    s = smooth_step(t)
    assert 0.0 <= s <= 1.0
    np.testing.assert_allclose(s + smooth_step(1.0 - t), 1.0, atol=1e-14)


def test_cutoff_plateau_and_support():
    c = Cutoff(1.0, -1.0, 1.0, 0.5)
    np.testing.assert_array_equal(c(np.array([-1.0, 0.0, 1.0])), 1.0)
    np.testing.assert_array_equal(c(np.array([-1.6, 1.6])), 0.0)


def test_dv_poly_on_constant_cutoff_region():
    cut = Cutoff(0.01, -1.2, -0.2, 0.1)
    V = PotentialSpec("multicut_perturbed", (0.0, 0.0, -1.0, 0.0, 1.0), (cut,))
    np.testing.assert_allclose(V.dv_poly_on(-1.0, -0.4), [0.0, -2.0, 0.0, 4.0])
    assert V.dv_poly_on(-0.3, 0.3) is None


def test_sublevel_components_double_well():
    comps = sublevel_components(DOUBLE_WELL, -0.1)
    assert len(comps) == 2
    # roots of x^4 - x^2 + 0.1 = 0
    r = np.sqrt((1 + np.array([-1, 1]) * np.sqrt(1 - 0.4)) / 2)
    np.testing.assert_allclose(comps[1], r, atol=1e-12)
    np.testing.assert_allclose(comps[0], -r[::-1], atol=1e-12)


def test_minimum_quartic_and_double_well():
    x, v = minimum(QUARTIC, -2, 2)
    assert abs(x) < 1e-3 and v < 1e-12
    x, v = minimum(DOUBLE_WELL, 0.1, 2)
    np.testing.assert_allclose([x, v], [1 / np.sqrt(2), -0.25], atol=1e-8)
