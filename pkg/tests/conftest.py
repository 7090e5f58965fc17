from fractions import Fraction

import pytest

from intersectprob import CoordinateSpace, Event, ProductSpace

ACCEPTANCE_LINES = []


@pytest.fixture
def bit_space():
    bit = CoordinateSpace.uniform("bit", (0, 1))
    return ProductSpace((bit, CoordinateSpace.uniform("bit2", (0, 1))))


@pytest.fixture
def two_events(bit_space):
    """A1 = {xi1 = 1}, A2 = {xi1 = 1 and xi2 = 1} over two fair bits."""
    a1 = Event.from_tuples(bit_space, "A1", [0], [(1,)])
    a2 = Event.from_tuples(bit_space, "A2", [0, 1], [(1, 1)])
    return bit_space, [a1, a2]


def rare_space(p=Fraction(1, 4000)):
    return ProductSpace((CoordinateSpace("y", (0, 1), (1 - p, p)),))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
