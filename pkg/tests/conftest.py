import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_outcomes = defaultdict(list)
_titles = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = marker.args


def pytest_runtest_logreport(report):
    args = getattr(report, "criterion", None)
    if args is None:
        return
    number, title = args
    _titles[number] = title
    if report.when == "call" or report.outcome != "passed":
        _outcomes[number].append((report.nodeid, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        results = _outcomes[number]
        passed = sum(outcome == "passed" for _, outcome in results)
        verdict = "PASS" if passed == len(results) else "FAIL"
        line = f"criterion {number:>2}: {verdict}  {_titles[number]} ({passed}/{len(results)} checks)"
        terminalreporter.write_line(line)
        for nodeid, outcome in results:
            if outcome != "passed":
                terminalreporter.write_line(f"    {outcome}: {nodeid.split('::', 1)[-1]}")
