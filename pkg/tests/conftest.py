import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# derandomized so that reruns draw the same examples
settings.register_profile("repo", deadline=None, derandomize=True, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance_log():
    def log(line: str):
        ACCEPTANCE_LINES.append(line)
        print(line)
    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

