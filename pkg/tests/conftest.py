import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from evorational import Lottery  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def kt_pair():
    return (
        Lottery.sure(2400),
        Lottery.from_pairs([(2500, 0.33), (2400, 0.66), (0, 0.01)]),
    )


@pytest.fixture
def safe_vs_risky():
    """sure(2) against a coin flip between 4 and 0.5; gap about +0.340 at w=0.99."""
    return Lottery.sure(2), Lottery.from_pairs([(4, 0.5), (0.5, 0.5)])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
