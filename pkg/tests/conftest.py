import pytest

_acceptance_results = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance: desk-scale acceptance gate (slow)")


@pytest.fixture
def acceptance_note(request):
    """Let a criterion attach a one-line result summary to the final report."""
    def set_note(text):
        request.node._acceptance_note = text
    return set_note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.get_closest_marker("acceptance"):
        _acceptance_results[item.name] = (
            rep.passed, getattr(item, "_acceptance_note", ""))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, note) in _acceptance_results.items():
        status = "PASS" if ok else "FAIL"
        suffix = f": {note}" if note else ""
        terminalreporter.write_line(f"{status} {name}{suffix}")
