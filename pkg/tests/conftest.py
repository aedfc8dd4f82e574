import numpy as np
import pytest
from hypothesis import strategies as st

from kelly_greedy.market import from_decimal_odds, from_state_prices

DATA = __import__("pathlib").Path(__file__).parent / "data"


@st.composite
def events(draw, min_n=1, max_n=8):
    n = draw(st.integers(min_n, max_n))
    raw = draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n))
    q = draw(st.lists(st.floats(0.02, 1.5), min_size=n, max_size=n))
    p = np.array(raw) / np.sum(raw)
    return from_state_prices([f"o{i}" for i in range(n)], p, q)


@pytest.fixture
def binary():
    return from_decimal_odds(["a", "b"], [0.6, 0.4], [2.0, 2.0])


@pytest.fixture
def example_b():
    return from_state_prices(["one", "two", "three"], [0.5, 0.3, 0.2], [0.3, 0.3, 0.4])


@pytest.fixture
def example_c():
    return from_decimal_odds(["one", "two", "three"], [0.5, 0.3, 0.2], [5.0, 5.0, 5.0])


@pytest.fixture
def no_edge():
    return from_state_prices(["one", "two", "three"], [0.5, 0.3, 0.2], [0.5, 0.3, 0.2])


# acceptance criteria report one line each at the end of the run
_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    def record(name, passed, detail=""):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
