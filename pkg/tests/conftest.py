import numpy as np
import pytest

from nlphase import Grid, KernelSpec, Nonlinearity, parse_config
from nlphase.scenarios import scenario_path
from nlphase.scheme import FieldPreset, Forcing, Scenario, solve_trajectory


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope='session')
def smooth():
    return parse_config(scenario_path('smooth1d'))


@pytest.fixture(scope='session')
def smooth_traj(smooth):
    return solve_trajectory(smooth)


@pytest.fixture(scope='session')
def zero_scenario():
    return parse_config(scenario_path('zero1d'))


def small_scenario(N=8, cells=16, **kw):
    grid = Grid((1.0,), (cells,))
    args = dict(
        grid=grid, T=0.5, N=N,
        kernel=KernelSpec('gaussian', amplitude=1.0, width=0.2),
        nl=Nonlinearity.cubic(1.0, 0.5, 0.1),
        forcing=Forcing.constant(0.7),
        theta0=FieldPreset('cos', amplitude=0.4),
        phi0=FieldPreset('cos', amplitude=0.9, offset=0.1),
        v0=FieldPreset('cos', amplitude=-0.3, mode=2))
    args.update(kw)
    return Scenario(**args)


ACCEPTANCE_LINES = []


def record(criterion, passed, detail):
    ACCEPTANCE_LINES.append('[{}] {:<34s} {}'.format(
        'PASS' if passed else 'FAIL', criterion, detail))
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section('acceptance criteria')
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
