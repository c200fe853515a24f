import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_record():
    """Collect one PASS/FAIL line per acceptance criterion."""
    return _ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
