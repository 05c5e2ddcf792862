import pytest

from hydroform.exactmath import PrecisionContext


@pytest.fixture
def ctx():
    return PrecisionContext(bits=128)


def close(a, b, rel, ctx, floor=0):
    """Relative comparison carried out at the working precision of ``ctx``."""
    with ctx.local():
        return abs(a - b) <= rel * max(abs(a), abs(b), floor)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
