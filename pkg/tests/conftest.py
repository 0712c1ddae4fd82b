import random

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from chenbar.exact import GQ

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gaussian = st.builds(GQ, small_fractions, small_fractions)


@pytest.fixture
def rng():
    return random.Random(20261019)
