import math

import pytest

from bimodal_cavity.fock_basis import build_sector, ground_state
from bimodal_cavity.model import ModelConfig, PulseSchedule

DEFAULT_T = 4.0 / 3.0
DEFAULT_G0 = 15.0


@pytest.fixture
def default_schedule():
    return PulseSchedule(DEFAULT_G0, DEFAULT_G0, 1.0, DEFAULT_T)


@pytest.fixture
def epr_model(default_schedule):
    return ModelConfig(build_sector(ground_state(2, 1, 0)), default_schedule, 0.0)


@pytest.fixture
def w3_model(default_schedule):
    return ModelConfig(build_sector(ground_state(3, 1, 0)), default_schedule, 0.0)


@pytest.fixture
def frozen_n2():
    """Frozen two-atom state with n=2, mu=0 at equal couplings (t = T/2)."""
    from bimodal_cavity.dark_state import freeze_state

    model = ModelConfig(build_sector(ground_state(2, 2, 0)),
                        PulseSchedule(DEFAULT_G0, DEFAULT_G0, 1.0, DEFAULT_T), 0.0)
    return freeze_state(model, DEFAULT_T / 2)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)


def isclose(a, b, tol):
    return math.isclose(a, b, rel_tol=0, abs_tol=tol)
