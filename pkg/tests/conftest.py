import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from phaseoracle.hilbert import StateVector  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def np_rng():
    return np.random.default_rng(12345)


def random_state(gen, n):
    amps = gen.normal(size=1 << (n + 1)) + 1j * gen.normal(size=1 << (n + 1))
    return StateVector.from_unnormalized(n, amps)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
