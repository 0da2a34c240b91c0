import numpy as np
import pytest

from artifact.model import Bistable, Grid, ModelParams, Monostable


@pytest.fixture
def grid():
    return Grid(401)


@pytest.fixture
def mono():
    return ModelParams(delta=0.1, epsilon=0.01, r=0.0, law=Monostable())


@pytest.fixture
def bistable():
    return ModelParams(delta=0.1, epsilon=0.01, r=1.0, law=Bistable(0.3))


def l2(grid, v):
    return float(np.sqrt(grid.integrate(np.asarray(v) ** 2)))


def logistic(u0, t, r=1.0):
    e = np.exp(r * t)
    return u0 * e / (1.0 + u0 * (e - 1.0))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
