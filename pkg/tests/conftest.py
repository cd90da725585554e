import numpy as np
import pytest

from fermiszego import schrodinger, testfunctions
from fermiszego.potentials import PotentialSpec

HARMONIC = PotentialSpec("harmonic")
QUARTIC = PotentialSpec("quartic")
DOUBLE_WELL = PotentialSpec("double_well")
X = testfunctions.polynomial(0.0, 1.0, name="x")
X2 = testfunctions.polynomial(0.0, 0.0, 1.0, name="x2")


@pytest.fixture(scope="session")
def harmonic_02():
    """Harmonic oscillator at hbar = 0.02, mu = 1 (N = 25)."""
    return schrodinger.solve(HARMONIC, 0.02, 1.0, box=(-2.2, 2.2), lambda_cap=1.5)


@pytest.fixture(scope="session")
def harmonic_04():
    return schrodinger.solve(HARMONIC, 0.04, 1.0, box=(-2.2, 2.2))


@pytest.fixture(scope="session")
def quartic_02():
    return schrodinger.solve(QUARTIC, 0.02, 1.0, box=(-1.8, 1.8))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:  # pragma: no cover
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
