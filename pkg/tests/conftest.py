"""Collects one pass/fail line per acceptance criterion and prints them at
the end of the run."""

import pytest

_DETAILS: dict[str, list[str]] = {}
_OUTCOMES: dict[str, str] = {}


@pytest.fixture
def record(request):
    """Append a measured value to the current criterion's summary line."""
    key = request.node.nodeid

    def add(text: str) -> None:
        _DETAILS.setdefault(key, []).append(text)

    return add


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _OUTCOMES[report.nodeid] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in _OUTCOMES.items():
        name = nodeid.split("::")[-1].removeprefix("test_")
        detail = "; ".join(_DETAILS.get(nodeid, []))
        terminalreporter.write_line(f"{outcome} {name}" + (f": {detail}" if detail else ""))
