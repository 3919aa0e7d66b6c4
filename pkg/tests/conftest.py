import sys
from collections import OrderedDict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    marker = getattr(report, "_criterion", None)
    if marker is None:
        return
    number, title = marker
    state = _CRITERIA.setdefault(number, {"title": title, "passed": True, "ran": False})
    if report.when == "call" or report.outcome != "passed":
        state["ran"] = True
        if report.outcome != "passed":
            state["passed"] = False


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report._criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        state = _CRITERIA[number]
        verdict = "PASS" if state["passed"] and state["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {verdict}  {state['title']}")
