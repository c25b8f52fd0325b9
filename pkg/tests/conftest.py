import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from maxhyp.material import ElasticParams, MaxwellParams

settings.register_profile("maxhyp", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("maxhyp")


@pytest.fixture
def unit_params():
    """c1^2 = d1^2 = 1, gamma = 2, frozen relaxation."""
    return MaxwellParams(ElasticParams(1.0, 1.0, 2.0, 1.0), math.inf)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def criterion(request):
    """``criterion(n, passed, detail)`` records one acceptance line and asserts it."""
    results = request.config.stash[_ACCEPTANCE]

    def record(n, passed, detail):
        results[n] = (bool(passed), detail)
        line = f"{'PASS' if passed else 'FAIL'} criterion {n}: {detail}"
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        passed, detail = results[n]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {n}: {detail}")
