import numpy as np
import pytest

from typmatch.dist import JointEdgeDistribution

REF_P = [[0.4, 0.1], [0.1, 0.4]]

_ACCEPTANCE_LINES = []


@pytest.fixture
def ref_dist():
    return JointEdgeDistribution(np.array(REF_P))


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
