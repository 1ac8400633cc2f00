import numpy as np
import pytest

from qdist.states import ProbVector

PLUS = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
MAXMIX2 = np.eye(2, dtype=complex) / 2


@pytest.fixture
def plus_state():
    return PLUS.copy()


@pytest.fixture
def maxmix2():
    return MAXMIX2.copy()


@pytest.fixture
def point_vs_uniform():
    return ProbVector([1.0, 0.0]), ProbVector([0.5, 0.5])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for idx in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[idx])
