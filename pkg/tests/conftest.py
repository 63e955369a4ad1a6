import numpy as np
import pytest
from scipy.special import gamma

from ibnls.grid import make_grid, sphere_area
from ibnls.ground_state import solve_ground_state
from ibnls.model import make_params


def gauss_moment(k, c):
    """∫_0^∞ r^k e^{-c r²} dr."""
    return gamma((k + 1) / 2.0) / (2.0 * c ** ((k + 1) / 2.0))


def gaussian_oracle(N, b):
    """Closed forms for f = exp(-r²) in R^N."""
    om = sphere_area(N)
    p = 2.0 * (N - b) / (N - 4)
    m = gauss_moment
    return {
        "mass": om * m(N - 1, 2),
        "grad_sq": om * 4 * m(N + 1, 2),
        "kinetic": om * (16 * m(N + 3, 2) - 16 * N * m(N + 1, 2) + 4 * N * N * m(N - 1, 2)),
        "potential": om * m(N - 1 - b, p),
    }


@pytest.fixture(scope="session")
def p61():
    return make_params(6, 1.0)


@pytest.fixture(scope="session")
def grid61(p61):
    return make_grid(p61, 30.0, 512)


@pytest.fixture(scope="session")
def gs61(grid61):
    return solve_ground_state(grid61)


@pytest.fixture(scope="session")
def grid82():
    return make_grid(make_params(8, 2.0), 30.0, 1024)


@pytest.fixture(scope="session")
def gs82(grid82):
    return solve_ground_state(grid82)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "ACCEPTANCE", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for num in sorted(lines):
            terminalreporter.write_line(lines[num])
