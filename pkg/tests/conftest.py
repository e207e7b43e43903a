import numpy as np
import pytest
from hypothesis import strategies as st

from plap import zoo

# Filled by test_acceptance.py; printed once at the end of the session.
AC_RESULTS: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> bool:
    AC_RESULTS[n] = (bool(ok), detail)
    print(f"AC{n:<2} {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if not AC_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(AC_RESULTS):
        ok, detail = AC_RESULTS[n]
        terminalreporter.write_line(f"AC{n:<2} {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def p7():
    return zoo.path(7)


@pytest.fixture
def c5():
    return zoo.cycle(5)


@pytest.fixture
def diamond():
    return zoo.diamond()


@pytest.fixture
def star():
    return zoo.weighted_star()


@pytest.fixture(scope="session")
def data_dir():
    from pathlib import Path

    return Path(__file__).resolve().parent.parent / "data"


def seeded_graphs(count: int, n_max: int = 8, boundary: bool = True, weighted: bool = True):
    """Deterministic random connected graphs with 3..n_max interior nodes."""
    out = []
    for s in range(count):
        rng = np.random.default_rng([2024, s])
        n = int(rng.integers(3, n_max + 1))
        b = int(rng.integers(0, 2)) if boundary else 0
        out.append(zoo.random_graph(rng, n, weighted=weighted, boundary=b))
    return out


@st.composite
def graphs(draw, n_min=2, n_max=8, weighted=True, boundary=True):
    """Hypothesis strategy: seeded connected random graphs."""
    seed = draw(st.integers(0, 2**31 - 1))
    n = draw(st.integers(n_min, n_max))
    b = draw(st.integers(0, 2)) if boundary else 0
    rng = np.random.default_rng(seed)
    return zoo.random_graph(rng, n, p_edge=draw(st.floats(0.2, 0.9)), weighted=weighted, boundary=b)
