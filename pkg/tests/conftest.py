import pytest

_RESULTS = []


@pytest.fixture
def criterion():
    """Record one acceptance line; asserts so the test fails with the same message."""

    def check(label, ok, detail=""):
        _RESULTS.append((label, bool(ok), detail))
        assert ok, f"{label}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _RESULTS:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {label}  {detail}")
