import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev = _RESULTS.get(number, (title, "PASS", ""))
        status = "PASS" if report.passed and prev[1] == "PASS" else "FAIL"
        note = getattr(item, "criterion_note", "") or prev[2]
        _RESULTS[number] = (title, status, note)


@pytest.fixture
def note(request):
    """Attach a one-line diagnostic to the criterion summary line."""

    def _set(text):
        request.node.criterion_note = text

    return _set


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, status, note = _RESULTS[number]
        line = f"criterion {number:2d} {status}  {title}"
        if note:
            line += f"  [{note}]"
        terminalreporter.write_line(line)
