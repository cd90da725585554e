import numpy as np
import pytest

from fermiszego import classical, multicut, testfunctions
from fermiszego.errors import NotMultiCut, SeparationFailed

from conftest import DOUBLE_WELL, HARMONIC, X

MU, EPS, BOX = -0.05, 0.01, (-1.8, 1.8)


@pytest.fixture(scope="module")
def base():
    return multicut.build_well_family(DOUBLE_WELL, MU, (0.0, 0.0), EPS)


@pytest.fixture(scope="module")
def spectra02(base):
    return multicut.family_spectra(base, 0.02, BOX)


def test_family_geometry(base):
    assert base.ell == 2
    (a0, b0), (a1, b1) = base.hosts
    np.testing.assert_allclose([a0, b0], [-b1, -a1], atol=1e-12)
    # host edges sit inside the barrier, off the separator by d / 2
    np.testing.assert_allclose(b0, -base.d / 2, atol=1e-10)
    assert base.check(np.linspace(*BOX, 4001))
    for W in base.wells:
        classical.turning_points(W, MU)


def test_localized_well_equals_v_on_host(base):
    W = base.wells[1]
    a, b = base.hosts[1]
    x = np.linspace(a, b, 101)
    np.testing.assert_array_equal(W(x), DOUBLE_WELL(x))
    left = np.linspace(-1.8, a, 200, endpoint=False)
    assert np.all(W(left) >= MU + EPS)


def test_full_potential_matches_wells_on_hosts(base):
    fam = base.with_weights((0.007, -0.004))
    x = np.linspace(*fam.hosts[0], 51)
    np.testing.assert_allclose(fam.full(x), fam.wells[0](x), atol=1e-15)
    x = np.linspace(*fam.hosts[1], 51)
    np.testing.assert_allclose(fam.full(x), fam.wells[1](x), atol=1e-15)


def test_weights_shift_turning_points(base):
    fam = base.with_weights((0.01, -0.01))
    up = classical.turning_points(fam.wells[0], MU)
    down = classical.turning_points(fam.wells[1], MU)
    ref = classical.turning_points(base.wells[1], MU)
    assert up[1] - up[0] < ref[1] - ref[0] < down[1] - down[0]


def test_not_multicut():
    with pytest.raises(NotMultiCut):
        multicut.build_well_family(HARMONIC, 1.0, (0.0, 0.0), EPS)


def test_symmetric_family_fails_separation(base, spectra02):
    rep = multicut.separation_report(base, 0.02, spectra02)
    assert not rep.passed and rep.min_cross_gap < 1e-10
    with pytest.raises(SeparationFailed):
        multicut.projector_decomposition_error(base, 0.02, spectra02)


def test_single_well_vacuous_pass():
    rep = multicut.separation_from_spectra([np.array([-0.2, -0.1, 0.1])], 0.0, 0.05, 1e-6)
    assert rep.cross_ok


def test_zero_perturbation_scan_fails(base):
    scan = multicut.resonance_scan(DOUBLE_WELL, MU, 0.0, [0.02], 5, 1, BOX, eps_family=EPS)
    assert scan.pass_rate[0.02] == 0.0


def test_draw_weights_reproducible():
    a = multicut.draw_weights(9, 3, 2, 0.01)
    assert a == multicut.draw_weights(9, 3, 2, 0.01)
    assert all(abs(v) <= 0.01 for v in a)


def test_generic_family_decomposition(base, spectra02):
    fam = base.with_weights(multicut.draw_weights(1, 0, 2, EPS))
    assert multicut.separation_report(fam, 0.02, spectra02).passed
    dr = multicut.projector_decomposition_error(fam, 0.02, spectra02)
    assert dr.rank_additive
    assert dr.hs_error < 0.05
    assert max(dr.commutators.values()) < 1e-3


def test_decomposition_error_decreases(base):
    fam = base.with_weights(multicut.draw_weights(1, 0, 2, EPS))
    errs = [multicut.projector_decomposition_error(fam, h, box=BOX).hs_error
            for h in (0.02, 0.01)]
    assert errs[1] < errs[0]


def test_function_in_one_well_only(base, spectra02):
    fam = base.with_weights(multicut.draw_weights(1, 0, 2, EPS))
    f = testfunctions.gaussian_bump(1.0, 0.7, 0.01)
    rep = multicut.multicut_variance_check(fam, 0.02, f, spectra=spectra02, M=1024)
    assert rep.var_wells_classical[0] < 1e-8
    assert rep.var_wells_exact[0] < 1e-8


def test_variance_report_consistency(base, spectra02):
    fam = base.with_weights(multicut.draw_weights(1, 0, 2, EPS))
    rep = multicut.multicut_variance_check(fam, 0.02, X, spectra=spectra02, M=1024)
    assert rep.rel_gap_exact < 0.02
    assert rep.log_laplace_gap < 1e-3
