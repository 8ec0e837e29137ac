import numpy as np
import pytest

from faultstab.fault_model import ObservationGrid, Rect, SineBasis
from faultstab.forward_op import ForwardModel, QuadratureRule
from faultstab.kernels import LameParams


def pytest_configure(config):
    config._acceptance = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance", [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line[1])


@pytest.fixture
def criterion(request):
    """Record a one-line pass/fail verdict for an acceptance criterion."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config._acceptance.append((number, line))
        print(line)

    return record


@pytest.fixture(scope="session")
def unit_lame():
    return LameParams(1.0, 1.0)


@pytest.fixture(scope="session")
def model(unit_lame):
    R = Rect()
    grid = ObservationGrid.uniform(-3, 3, -3, 3, 13, 13)
    return ForwardModel(unit_lame, grid, QuadratureRule.gauss_legendre(R, 24), SineBasis(3, 3, R))


@pytest.fixture(scope="session")
def small_model(unit_lame):
    R = Rect()
    grid = ObservationGrid.uniform(-3, 3, -3, 3, 7, 7)
    return ForwardModel(unit_lame, grid, QuadratureRule.gauss_legendre(R, 12), SineBasis(2, 2, R))


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))
