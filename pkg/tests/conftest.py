"""Per-criterion pass/fail summary for the acceptance suite.

Tests marked ``@pytest.mark.criterion(n, "title")`` are grouped by ``n``; the
terminal summary prints one line per criterion once the session ends.
"""

from collections import defaultdict

import pytest

_RESULTS = defaultdict(list)
_TITLES = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    _TITLES[number] = title
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _RESULTS[number].append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        outcomes = _RESULTS[number]
        failed = [name for name, o in outcomes if o == "failed"]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {number:>2} [{status}] {_TITLES[number]} ({len(outcomes) - len(failed)}/{len(outcomes)})"
        if failed:
            line += ": failing " + ", ".join(failed)
        terminalreporter.write_line(line)
