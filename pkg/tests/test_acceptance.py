"""Acceptance suite: one test per criterion clause, run on the shipped configs.

Each test prints a ``[PASS]``/``[FAIL]`` line with the measured value and
threshold; the lines are repeated in the terminal summary.
"""
from pathlib import Path

import pytest

from fermiszego import experiments
from fermiszego.config import load_config

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
_cache = {}
LINES = []

# (criterion, config, subcommand, criterion_id prefix)
CLAUSES = [
    (1, "harmonic", "spectrum", "1.max_error"),
    (1, "harmonic", "spectrum", "1.refinement_ratio"),
    (1, "harmonic", "spectrum", "1.runtime_s"),
    (2, "harmonic", "spectrum", "2.rank_vs_action"),
    (2, "quartic", "spectrum", "2.rank_vs_action"),
    (2, "double_well", "spectrum", "2.rank_vs_action"),
    (3, "harmonic", "variance", "3.route_agreement"),
    (3, "harmonic", "variance", "3.exact_relative_error_finest"),
    (3, "harmonic", "variance", "3.exact_error_decreasing"),
    (3, "harmonic", "variance", "3.runtime_s"),
    (4, "harmonic", "clt", "4.szego_residual[x]"),
    (4, "harmonic", "clt", "4.szego_residual_decreasing[x]"),
    (4, "quartic", "clt", "4.szego_residual[x]"),
    (4, "quartic", "clt", "4.szego_residual_decreasing[x]"),
    (4, "harmonic", "clt", "4.runtime_s"),
    (4, "quartic", "clt", "4.runtime_s"),
    (5, "quartic", "clt", "5.kappa3_finest[bump]"),
    (5, "quartic", "clt", "5.kappa4_finest[bump]"),
    (5, "quartic", "clt", "5.kappa3_shrinking[bump]"),
    (5, "quartic", "clt", "5.kappa4_shrinking[bump]"),
    (6, "harmonic", "szego", "6.dhk_exact"),
    (6, "harmonic", "szego", "6.runtime_s"),
    (7, "harmonic", "clt", "7.upsilon_bound_n_le_8"),
    (7, "harmonic", "clt", "7.upsilon_reconstruction"),
    (7, "quartic", "clt", "7.upsilon_bound_n_le_8"),
    (7, "quartic", "clt", "7.upsilon_reconstruction"),
    (7, "double_well", "clt", "7.upsilon_bound_n_le_8"),
    (7, "double_well", "clt", "7.upsilon_reconstruction"),
    (8, "harmonic", "szego", "8.residual@N=256[2cos]"),
    (8, "harmonic", "szego", "8.residual_monotone[2cos]"),
    (8, "harmonic", "szego", "8.residual_monotone[log_rho0.97]"),
    (9, "harmonic", "toeplitz", "9.deviation@hbar=0.02"),
    (9, "harmonic", "toeplitz", "9.halving_ratio"),
    (10, "harmonic", "sample", "10.z_variance"),
    (10, "harmonic", "sample", "10.z_skewness"),
    (10, "harmonic", "sample", "10.z_kurtosis"),
    (10, "harmonic", "sample", "10.runtime_s"),
    (11, "harmonic", "sample", "11.counting_covariance_ratio@hbar=0.005"),
    (12, "double_well", "multicut", "12.pass_rate@hbar=0.02"),
    (12, "double_well", "multicut", "12.symmetric_fails"),
    (12, "double_well", "multicut", "12.decomposition_error@hbar=0.02"),
    (12, "double_well", "multicut", "12.rank_additive@hbar=0.02"),
    (12, "double_well", "multicut", "12.variance_additivity"),
    (12, "double_well", "multicut", "12.log_laplace_additivity@hbar=0.02"),
    (12, "double_well", "multicut", "12.runtime_s"),
]


@pytest.fixture(scope="session")
def acceptance_out(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def _run(config, sub, out):
    key = (config, sub)
    if key not in _cache:
        cfg = load_config(CONFIGS / f"{config}.toml")
        _cache[key] = experiments.RUNNERS[sub](cfg, out / config)
    return _cache[key]


def _fmt(v):
    return experiments._jsonable(v)


@pytest.mark.parametrize("crit, config, sub, prefix", CLAUSES,
                         ids=[f"c{c:02d}-{cfg}-{p}" for c, cfg, _, p in CLAUSES])
def test_criterion(crit, config, sub, prefix, acceptance_out):
    res = _run(config, sub, acceptance_out)
    entries = [e for e in res.criteria if e["criterion_id"].startswith(prefix)]
    assert entries, f"no entry {prefix!r} in {config}/{sub}"
    for e in entries:
        tag = "PASS" if e["pass"] else "FAIL"
        line = (f"[{tag}] criterion {crit:>2} {config}/{sub} {e['criterion_id']}: "
                f"measured={_fmt(e['measured'])} threshold={_fmt(e['threshold'])}")
        LINES.append(line)
        print(line)
    failed = [e["criterion_id"] for e in entries if not e["pass"]]
    assert not failed, f"failed: {failed}"
