import numpy as np
import pytest
from scipy.special import eval_hermite, factorial

from psqm.grid import ConfigGrid, PhaseGrid
from psqm.gaussian import gaussian_window
from psqm.selftest import random_state


def hermite_oracle(n, grid):
    """Hermite function from scipy's polynomials (independent of the package recurrence)."""
    h = grid.hbar
    return grid.sample(
        lambda x: (2.0**n * factorial(n)) ** -0.5
        * (np.pi * h) ** -0.25
        * eval_hermite(n, x / np.sqrt(h))
        * np.exp(-x * x / (2 * h))
    )


@pytest.fixture(scope="session")
def grid128():
    return ConfigGrid.self_dual(128)


@pytest.fixture(scope="session")
def pg128(grid128):
    return PhaseGrid.from_config(grid128)


@pytest.fixture(scope="session")
def window128(grid128):
    return gaussian_window(grid128)


@pytest.fixture(scope="session")
def grid64():
    return ConfigGrid.self_dual(64)


@pytest.fixture(scope="session")
def pg64(grid64):
    return PhaseGrid.from_config(grid64)


@pytest.fixture(scope="session")
def window64(grid64):
    return gaussian_window(grid64)


@pytest.fixture(scope="session")
def hermites128(grid128):
    return [hermite_oracle(n, grid128) for n in range(6)]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def states128(grid128, rng):
    return [random_state(grid128, rng) for _ in range(6)]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
