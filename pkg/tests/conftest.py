import numpy as np
import pytest
from hypothesis import strategies as st

from dgsolve.linalg import SpdSystem
from dgsolve.problems import random_spd


def random_system(n, seed, cond=10.0, scale=1.0):
    """Random SPD system with eigenvalues in scale*[1, cond] and a random b."""
    a = random_spd(n, seed, cond=cond, scale=scale)
    b = np.random.default_rng([seed, 99]).standard_normal(n)
    return SpdSystem(a, b)


def f_direct(a, b, x):
    """Energy evaluated straight from the definition."""
    return 0.5 * x @ a @ x - x @ b


@st.composite
def spd_systems(draw, n_min=2, n_max=12):
    n = draw(st.integers(n_min, n_max))
    seed = draw(st.integers(0, 2**31 - 1))
    cond = draw(st.sampled_from([2.0, 10.0, 100.0]))
    scale = draw(st.sampled_from([0.01, 1.0, 50.0]))
    return random_system(n, seed, cond=cond, scale=scale)


@pytest.fixture
def two_by_two():
    return SpdSystem([[2.0, 1.0], [1.0, 2.0]], [3.0, 3.0])


ACCEPTANCE_LINES = []


def record_criterion(number, title, ok, detail=""):
    """Log one acceptance criterion as a PASS/FAIL line (echoed in the terminal summary)."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}"
    if detail:
        line += f" -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
