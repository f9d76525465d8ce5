import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

EXP1 = [1, 2, 3, 4, 5]
EXP2 = [0, 0, 1, 1, 2]


@pytest.fixture
def exp1_profile():
    from qmrlab.distributions import deterministic_profile

    return deterministic_profile(EXP1, 3)


@pytest.fixture
def exp2_profile():
    from qmrlab.distributions import deterministic_profile

    return deterministic_profile(EXP2, 3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    verdicts = getattr(sys.modules.get("test_acceptance"), "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(verdicts):
        status, detail = verdicts[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  ({detail})")
