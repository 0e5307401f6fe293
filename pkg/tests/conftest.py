import math

import numpy as np
import pytest
from hypothesis import settings

# the CI box is slow; examples are cheap but wall-clock deadlines are not meaningful
settings.register_profile("vortexkg", deadline=None, max_examples=40)
settings.load_profile("vortexkg")

ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(number, title, passed, detail)."""

    def record(number, title, passed, detail):
        line = f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        ACCEPTANCE.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)


@pytest.fixture
def two_pi():
    return 2 * math.pi


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
