"""Acceptance bookkeeping: one PASS/FAIL line per criterion at the end of the run."""
import pytest

_RESULTS: dict[int, tuple[str, list[bool]]] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    _RESULTS.setdefault(number, (title, []))[1].append(call.excinfo is None)


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, outcomes = _RESULTS[number]
        status = "PASS" if all(outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
