import mpmath
import pytest

from cmhl.arith import DEFAULT_CONTEXT

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(autouse=True)
def working_precision():
    """Run every test at the default working precision; mpmath's context is global."""
    old = mpmath.mp.prec
    mpmath.mp.prec = DEFAULT_CONTEXT.working_bits
    yield
    mpmath.mp.prec = old


@pytest.fixture
def ctx():
    return DEFAULT_CONTEXT


@pytest.fixture
def report_criterion():
    def emit(number: int, title: str, passed: bool, detail: str = ""):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {title}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
