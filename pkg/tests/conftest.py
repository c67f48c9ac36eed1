import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from builders import cc, one_edge  # noqa: E402


@pytest.fixture
def ge2():
    return one_edge(cc("x", ">=", 2))


@pytest.fixture
def gt0():
    return one_edge(cc("x", ">", 0))


# acceptance criteria report: one PASS/FAIL line per test marked with @pytest.mark.criterion
_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion covered by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.passed else "FAIL"
        line = f"{status}  {marker.args[0]}  ({report.duration:.2f} s)"
        _CRITERIA.append(line)


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
