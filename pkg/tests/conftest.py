import numpy as np
import pytest

from papa.system import SolverState

ACCEPTANCE_LINES: list[str] = []


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_state(rng, n_users, n_antennas, power_scale=1.0):
    S = crandn(rng, n_antennas, n_users)
    p = power_scale * rng.uniform(0.1, 2.0, n_users)
    C = crandn(rng, n_antennas, n_users)
    return SolverState(p, C, S)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
