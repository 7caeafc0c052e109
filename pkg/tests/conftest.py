"""Shared test plumbing: the acceptance-criteria report.

Tests marked @pytest.mark.criterion(n, title) get one PASS/FAIL line each
in the terminal summary, with the measured values they record.
"""

import pytest

_DETAILS = {}
_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(num, title): acceptance criterion with a summary line"
    )


@pytest.fixture
def record(request):
    """Stores the measured-value text shown on this criterion's summary line."""
    mark = request.node.get_closest_marker("criterion")

    def _record(text):
        _DETAILS[mark.args[0]] = text

    return _record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None and report.when == "call":
        _RESULTS[mark.args[0]] = (mark.args[1], report.passed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        title, passed = _RESULTS[num]
        verdict = "PASS" if passed else "FAIL"
        detail = _DETAILS.get(num)
        line = f"criterion {num}: {verdict}: {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
