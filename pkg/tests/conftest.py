import pytest

_LINES = []


@pytest.fixture
def verdict():
    """Record one acceptance line, echo it, and fail the test when the criterion fails."""
    def record(criterion: int, title: str, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} [{criterion:2d}] {title}: {detail}"
        _LINES.append((criterion, line))
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
