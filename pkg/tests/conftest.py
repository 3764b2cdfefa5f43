import pytest

CRITERIA_LINES = []


@pytest.fixture
def criterion():
    """Record a one-line verdict for an acceptance criterion, then assert it."""
    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {label}: {detail}"
        CRITERIA_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA_LINES:
            terminalreporter.write_line(line)
