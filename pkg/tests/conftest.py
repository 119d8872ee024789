from __future__ import annotations

import pytest

_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, text = mark.args
    failed = report.failed or (report.when == "call" and report.skipped)
    if failed:
        _RESULTS[n] = ("FAIL", text)
    elif report.when == "call" and n not in _RESULTS:
        _RESULTS[n] = ("PASS", text)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        status, text = _RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {text}")
