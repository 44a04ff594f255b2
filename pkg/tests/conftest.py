import numpy as np
import pytest

from freelip.metric_space import PointedMetricSpace, line_space

_ACCEPTANCE = []


@pytest.fixture
def line():
    return line_space(3)


@pytest.fixture
def line_exact():
    return line_space(3, "exact")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def z2_space():
    # base 0 with a, b at distance 1 from it and 2 from each other
    return PointedMetricSpace(["0", "a", "b"], [[0, 1, 1], [1, 0, 2], [1, 2, 0]], 0, "exact")


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}")
