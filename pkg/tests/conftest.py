import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from switchplan import SCENARIOS, SolverOptions, run_pipeline  # noqa: E402


ACCEPTANCE_LINES = []


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running numerical checks")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


_CACHE = {}


def solved(sid, n_points=100, eps=1e-6, mode="sub-solution", **kw):
    """Cached pipeline result for a named scenario."""
    key = (sid, n_points, eps, mode, tuple(sorted(kw.items())))
    if key not in _CACHE:
        spec = SCENARIOS[sid]
        _CACHE[key] = run_pipeline(spec.params, spec.costs, n_points,
                                   SolverOptions(eps_conv=eps, mode=mode), warn=False, **kw)
    return _CACHE[key]


@pytest.fixture(params=["s1", "s2", "s3", "s4"])
def sid(request):
    return request.param
