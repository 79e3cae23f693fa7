import pytest
from hypothesis import settings
from hypothesis import strategies as st

from qresb import BehavioralParams, new_game

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def example():
    return new_game(6, 7, 1, 2)


@pytest.fixture
def record_criterion():
    """Log one PASS/FAIL line per acceptance criterion, then assert it."""

    def record(number: int, ok: bool, detail: str):
        ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


payoff = st.floats(-20, 20, allow_nan=False, allow_infinity=False)
gap = st.floats(0.01, 10, allow_nan=False, allow_infinity=False)


@st.composite
def games(draw):
    c = draw(payoff)
    d = draw(payoff)
    a = max(c, d) + draw(gap)
    b = a + draw(gap)
    return new_game(a, b, c, d)


@st.composite
def contraction_params(draw, game, max_modulus=0.9):
    beta = draw(st.floats(0, max_modulus)) * 4 / game.slope
    kappa = draw(st.floats(0, 3))
    return BehavioralParams(beta, kappa)


settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")
