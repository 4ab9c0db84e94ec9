import random
from fractions import Fraction

import pytest

from altmark.prob import IidDistribution

ACCEPTANCE_LINES = []


def random_rational_dist(rng, m, max_weight=30):
    return IidDistribution.from_weights([rng.randint(1, max_weight) for _ in range(m)])


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def third():
    return Fraction(1, 3)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
