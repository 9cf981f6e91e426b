import numpy as np
import pytest

from logdmo.fk import Section


@pytest.fixture
def rng():
    return np.random.default_rng(20000301)


def make_geometry(nt=512, nx=256, dt=0.004, dx=12.5, h=500.0):
    """Empty section with the first sample at t=dt and x=0 on the centre trace."""
    return Section(np.zeros((nt, nx)), dt, dx, dt, -(nx // 2) * dx, h)


@pytest.fixture
def acceptance_geometry():
    return make_geometry()


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line; returns the ok flag for asserting."""

    def record(number, ok, detail):
        line = f"acceptance {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
