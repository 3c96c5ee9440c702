import time

import pytest

_ACCEPTANCE: dict[int, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call":
        return
    number, title = mark.args
    details = "; ".join(f"{k}={v}" for k, v in item.user_properties)
    verdict = "PASS" if report.passed else "FAIL"
    _ACCEPTANCE[number] = f"criterion {number} {verdict} ({call.duration:.1f}s) {title}" + (
        f" | {details}" if details else "")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])


@pytest.fixture
def stopwatch():
    start = time.perf_counter()
    return lambda: time.perf_counter() - start
