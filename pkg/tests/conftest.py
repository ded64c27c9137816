import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    """Collects one-line criterion summaries shown at the end of the run."""
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_order):
            terminalreporter.write_line(line)


def _order(line):
    head = line.split()[0]
    try:
        return (0, int(head.strip("C:")), line)
    except ValueError:
        return (1, 0, line)
