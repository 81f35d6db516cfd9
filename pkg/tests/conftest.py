import random

import pytest

from twoprobe.fixtures import dbl, fig1c, random_scheme, toy3


@pytest.fixture
def toy():
    return toy3()


@pytest.fixture
def fig():
    return fig1c()


@pytest.fixture
def broken():
    return dbl()


def random_schemes(seed, count, s_choices=(2, 3, 4, 5, 6), b_choices=(4, 5, 6, 7, 8, 9, 10)):
    rng = random.Random(seed)
    return [random_scheme(rng, rng.choice(s_choices), rng.choice(b_choices)) for _ in range(count)]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
