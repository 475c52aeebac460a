import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from hankel_schatten.series import FormalSeries

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def series(draw, max_degree=24, block_dim=1):
    """Random complex series with bounded coefficients."""
    deg = draw(st.integers(0, max_degree))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    g = np.random.default_rng(seed)
    shape = (deg + 1, block_dim, block_dim)
    return FormalSeries(g.standard_normal(shape) + 1j * g.standard_normal(shape))


exponents = st.sampled_from([1.0, 1.5, 2.0, 3.0, 4.0, np.inf])


ACCEPTANCE_LINES: list[tuple[int, str]] = []


@pytest.fixture
def report_criterion():
    """Record one acceptance line; all lines are repeated in the terminal summary."""

    def record(number: int, title: str, passed: bool, detail: str, seconds: float, limit: float):
        in_time = seconds < limit
        status = "PASS" if passed and in_time else "FAIL"
        line = f"[{status}] C{number}: {title}: {detail}; {seconds:.2f}s (limit {limit:g}s)"
        ACCEPTANCE_LINES.append((number, line))
        print(line)
        return passed and in_time

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
