import copy

import numpy as np
import pytest

from conftest import small_scenario
from nlphase.checks import (mass_balance, interpolant_identities, run_checks,
                            subdifferential_slack)
from nlphase.grid import Grid
from nlphase.scheme import Trajectory, solve_trajectory


def test_suite_passes_on_scheme_output():
    s = small_scenario(N=10)
    results = run_checks(solve_trajectory(s))
    assert all(r.passed for r in results), [r.line() for r in results]
    names = {r.name for r in results}
    assert {'mass_balance', 'subdifferential', 'scheme_residual_theta',
            'scheme_residual_phi', 'interp_bar_hat_theta_L2H'} <= names


def test_interpolant_identities_random_nodes(rng):
    g = Grid((1.0, 1.0), (3, 4))
    for N in (1, 2, 7):
        traj = Trajectory.from_nodes(g, 1.3, rng.normal(size=(N + 1, 3, 4)),
                                     rng.normal(size=(N + 1, 3, 4)),
                                     rng.normal(size=(3, 4)))
        res = interpolant_identities(traj)
        assert len(res) == 8
        assert max(res.values()) <= 1e-12


@pytest.mark.parametrize('target,name', [
    ('theta', 'scheme_residual_theta'),
    ('phi', 'scheme_residual_phi'),
])
def test_corrupted_trajectory_is_named(target, name):
    s = small_scenario(N=10)
    traj = solve_trajectory(s)
    bad = copy.copy(traj)
    arr = getattr(traj, target).copy()
    arr[5, 3] += 1e-3
    setattr(bad, target, arr)
    failed = {r.name for r in run_checks(bad) if not r.passed}
    assert name in failed


def test_corrupted_velocity_breaks_interpolant_identity():
    s = small_scenario(N=10)
    traj = solve_trajectory(s)
    bad = copy.copy(traj)
    bad.v = traj.v.copy()
    bad.v[4] *= 1.01
    failed = {r.name for r in run_checks(bad) if not r.passed}
    assert 'difference_quotients' in failed
    assert 'interp_bar_hat_phi_LinfLinf' in failed or \
        'interp_bar_hat_v_LinfH' in failed


def test_mass_and_subdifferential_on_scheme(smooth_traj, smooth):
    assert np.max(mass_balance(smooth_traj)) <= 1e-10
    assert np.min(subdifferential_slack(smooth_traj, smooth.nl)) >= -1e-10
