import numpy as np
import pytest
from hypothesis import strategies as st

from gibbsdisc import PDParams, SampleSummary

ALPHAS = [0.1, 0.25, 0.5, 0.75, 0.9]
THETA_GRID = ["-alpha/2", 0.5, 1.0, 10.0, 100.0]


def pd_grid():
    """The (alpha, theta) grid used by the identity checks."""
    out = []
    for a in ALPHAS:
        for th in THETA_GRID:
            out.append(PDParams(a, -a / 2 if th == "-alpha/2" else th))
    return out


def integer_partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def random_sample(rng, max_n=30):
    """Random multiplicity vector with total n uniform on 1..max_n."""
    n = int(rng.integers(1, max_n + 1))
    mult = []
    left = n
    while left:
        x = int(rng.integers(1, left + 1))
        # bias toward small species so samples look like real frequency data
        x = min(x, int(rng.geometric(0.4)))
        mult.append(x)
        left -= x
    return SampleSummary.from_multiplicities(mult)


@pytest.fixture
def rng():
    return np.random.default_rng(20130115)


@pytest.fixture
def pd_half():
    return PDParams(0.5, 0.5)


@pytest.fixture
def one_singleton():
    return SampleSummary.from_counts({1: 1})


alphas = st.floats(min_value=0.01, max_value=0.99)


@st.composite
def pd_params(draw):
    a = draw(alphas)
    th = draw(st.one_of(st.floats(min_value=-a + 1e-3, max_value=5.0), st.floats(min_value=5.0, max_value=200.0)))
    return PDParams(a, th)


@st.composite
def samples(draw, max_n=20):
    mult = draw(st.lists(st.integers(min_value=1, max_value=6), min_size=1, max_size=8))
    total = sum(mult)
    while total > max_n:
        total -= mult.pop()
    if not mult:
        mult = [1]
    return SampleSummary.from_multiplicities(mult)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
