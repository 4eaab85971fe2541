import numpy as np
import pytest

from ghlab.metric import validate

ACCEPTANCE_LINES = []


def triangle(a, b, c):
    """Three points with d01 = a, d12 = b, d02 = c."""
    return validate([[0, a, c], [a, 0, b], [c, b, 0]])


def two_points(d):
    return validate([[0, d], [d, 0]])


def integer_metric(n, seed, top=3):
    """Random metric with small integer distances; many ties and degenerate triangles."""
    rng = np.random.default_rng(seed)
    while True:
        d = np.triu(rng.integers(1, top + 1, size=(n, n)), 1)
        try:
            return validate(d + d.T)
        except ValueError:
            pass


@pytest.fixture
def m346():
    return triangle(3, 4, 6)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
