import numpy as np
import pytest
from hypothesis import settings

from btt_grand.gf2 import BitMatrix

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def small_h():
    """3x4 parity check matrix of the worked tree-sorting example."""
    return BitMatrix.from_dense([[1, 0, 0, 1], [0, 1, 1, 1], [0, 1, 0, 1]])


@pytest.fixture
def tree8_h():
    """3x8 tree-sorted matrix whose columns are 7, 6, ..., 0."""
    cols = [7, 6, 5, 4, 3, 2, 1, 0]
    return BitMatrix.from_dense(np.array([[(c >> (2 - i)) & 1 for c in cols] for i in range(3)]))


_ACCEPTANCE: list[str] = []


@pytest.fixture
def verdict():
    """Records one PASS/FAIL line per acceptance criterion."""

    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"criterion {number} {'PASS' if passed else 'FAIL'} {title}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
