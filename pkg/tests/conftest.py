import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from smoothtrim import WeightSpec

STM_DEFAULT = WeightSpec.generalized(0.1, 0.2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def samples(min_size=20, max_size=120):
    """Finite, moderately scaled data vectors for property tests."""
    return st.integers(min_size, max_size).flatmap(
        lambda n: arrays(np.float64, n, elements=st.floats(-1e3, 1e3, allow_nan=False, width=64))
    )


def specs():
    return st.tuples(st.sampled_from([0.0, 0.05, 0.1, 0.15, 0.2]), st.sampled_from([0.05, 0.1, 0.2, 0.3, 0.4])) \
        .filter(lambda ag: ag[0] < ag[1]).map(lambda ag: WeightSpec.generalized(*ag))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
