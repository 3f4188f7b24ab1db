import numpy as np
import pytest

from bethe_segment.harness import RunConfig, Sampler

Q = 1.27144 + 0.271j

# lines collected by the acceptance tests, printed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sampler(rng):
    return Sampler(rng)


@pytest.fixture
def model(sampler):
    """model(n, case) -> random admissible ModelParams with the case's zero fields."""

    def make(n, case="upper_upper", q=Q):
        return sampler.model(n, q, case)

    return make


@pytest.fixture(scope="session")
def default_config():
    return RunConfig.default()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
