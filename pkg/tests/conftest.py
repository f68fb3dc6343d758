"""One PASS/FAIL line per acceptance criterion at the end of the run."""
from __future__ import annotations

import pytest

_OUTCOMES: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion this test gates")


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    number, title = crit
    entry = _OUTCOMES.setdefault(number, {"title": title, "failed": False, "seen": False})
    if report.when == "call" or report.failed or report.skipped:
        entry["seen"] = True
    if report.failed or (report.when == "call" and report.skipped):
        entry["failed"] = True


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        e = _OUTCOMES[number]
        status = "FAIL" if e["failed"] or not e["seen"] else "PASS"
        terminalreporter.write_line(f"criterion {number}: {status}  {e['title']}")
