import numpy as np
import pytest

from nlresponse.bath import CorrelationMatrix, ObOLineBroadening, ObOParams
from nlresponse.cumulant import PathwaySpec, SystemSpec

REF = dict(lambda_reorg=100.0, tau_corr=100.0, temperature=300.0)

# (criterion number, PASS/FAIL line) filled by test_acceptance.py
ACCEPTANCE = []


def make_system(levels_cm=(10000.0,), dipoles=(1.0,), frame_cm=None, lam=100.0, tau_corr=100.0,
                temperature=300.0, coefficients=None):
    """OBO system; the rotating frame defaults to the first level."""
    base = ObOLineBroadening(ObOParams(lam, tau_corr, temperature))
    corr = CorrelationMatrix(base, len(levels_cm), coefficients)
    frame = levels_cm[0] if frame_cm is None else frame_cm
    return SystemSpec.from_wavenumbers(list(levels_cm), list(dipoles), corr, frame)


@pytest.fixture
def ref_params():
    return ObOParams(**REF)


@pytest.fixture
def ref_system():
    return make_system()


@pytest.fixture
def bare_system():
    return make_system(lam=0.0)


@pytest.fixture
def diag():
    return PathwaySpec(0, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)
