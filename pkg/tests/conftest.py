import pytest
from hypothesis import settings

from collatz_transfer.space import CoeffVec

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# filled by test_acceptance via the ``criterion`` fixture
ACCEPTANCE_LINES = {}


@pytest.fixture
def criterion():
    def record(number, ok, detail=""):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


def vec(**kw):
    """vec(d3=1, d5="1/2") -> CoeffVec."""
    return CoeffVec({int(k[1:]): v for k, v in kw.items()})
