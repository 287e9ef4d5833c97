import math

import numpy as np
import pytest

from conftest import small_scenario
from nlphase.grid import Grid
from nlphase.kernel import Kernel, KernelSpec
from nlphase.resolvent import InadmissibleStepError, Nonlinearity
from nlphase.scheme import (FieldPreset, Forcing, Scenario, StepError,
                            StepState, Stepper, Trajectory, average_forcing,
                            eval_bar, eval_hat, eval_underline, hat_slope,
                            solve_trajectory)

G = Grid((1.0,), (16,))


def test_average_forcing_examples():
    one = Forcing.constant(1.0)
    np.testing.assert_array_equal(average_forcing(one, G, 3, 0.1), 1.0)
    lin = Forcing(FieldPreset('constant', offset=1.0), 'poly', (0.0, 1.0))
    np.testing.assert_allclose(average_forcing(lin, G, 1, 0.1), 0.05,
                               rtol=1e-14)
    cos = Forcing(FieldPreset('constant', offset=1.0), 'cos', omega=1.0)
    oracle = (math.sin(0.2) - math.sin(0.1)) / 0.1
    np.testing.assert_allclose(average_forcing(cos, G, 2, 0.1), oracle,
                               rtol=1e-12)


def test_average_forcing_exact_for_quintic():
    coeffs = (0.3, -1.0, 2.0, 0.5, -0.7, 1.1)
    f = Forcing(FieldPreset('cos', amplitude=2.0), 'poly', coeffs)
    P = np.polynomial.Polynomial(coeffs).integ()
    h, k = 0.37, 4
    exact = (P(k * h) - P((k - 1) * h)) / h
    np.testing.assert_allclose(average_forcing(f, G, k, h),
                               exact * f.spatial.sample(G), rtol=1e-13)
    with pytest.raises(ValueError):
        average_forcing(f, G, 0, h)


def test_scenario_rejects_inadmissible_step():
    with pytest.raises(InadmissibleStepError):
        Scenario(G, T=1.0, N=2, nl=Nonlinearity.cubic(1.0, b=2.0))
    Scenario(G, T=1.0, N=3, nl=Nonlinearity.cubic(1.0, b=2.0))


def test_scenario_rejects_nonfinite_initial_data():
    with pytest.raises(ValueError):
        Scenario(G, theta0=FieldPreset('constant', offset=float('inf')))


def _stepper(s):
    return Stepper(s.grid, s.h, Kernel(s.kernel, s.grid), s.nl)


def test_zero_state_is_fixed_point():
    s = Scenario(G, T=1.0, N=10, nl=Nonlinearity.cubic(1.0, 0.5, 0.0))
    z = G.zeros()
    new = _stepper(s).step(StepState(0, z, z, z, z), z)
    for u in (new.theta, new.phi, new.v, new.z):
        assert np.all(u == 0.0)


def test_constant_forcing_from_rest():
    s = Scenario(G, T=1.0, N=10, forcing=Forcing.constant(1.0),
                 nl=Nonlinearity.cubic(1.0, 0.5, 0.0))
    traj = solve_trajectory(s.with_steps(10))
    assert np.all(traj.phi[1] == 0.0) and np.all(traj.v[1] == 0.0)
    np.testing.assert_allclose(traj.theta[1], 0.1, rtol=1e-14)


def naive_step(s, theta, phi, v, f_next):
    """Straight-line step: double-loop convolution, scalar bisection and a
    dense linear solve with an explicitly assembled ghost-cell Laplacian."""
    grid, h, nl = s.grid, s.h, s.nl
    n = grid.cells[0]
    dx = grid.spacing[0]
    x = grid.coords()[0]
    J = lambda d: s.kernel.amplitude * math.exp(-d * d
                                                / (2 * s.kernel.width**2))
    a = np.array([sum(J(xi - yj) for yj in x) * dx for xi in x])
    conv = np.array([sum(J(xi - yj) * pj for yj, pj in zip(x, phi)) * dx
                     for xi in x])
    g = (h * h * theta + phi + h * v + h * phi - h * h * a * phi
         + h * h * conv)
    phi_new = np.empty(n)
    for i in range(n):
        F = lambda r: ((1 + h) * r + h * h * sum(c * r**p for p, c in nl.beta)
                       + h * h * (nl.pi_b * r + nl.pi_c) - g[i])
        lo, hi = -50.0, 50.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if F(mid) < 0:
                lo = mid
            else:
                hi = mid
        phi_new[i] = 0.5 * (lo + hi)
    L = np.zeros((n, n))
    for i in range(n):
        for j in (i - 1, i + 1):
            jj = min(max(j, 0), n - 1)
            L[i, jj] += 1 / dx**2
            L[i, i] -= 1 / dx**2
    rhs = h * f_next + phi - phi_new + theta
    theta_new = np.linalg.solve(np.eye(n) - h * L, rhs)
    return theta_new, phi_new


def test_step_matches_naive_oracle():
    s = small_scenario(N=5, cells=24)
    traj = solve_trajectory(s)
    for n in (0, 3):
        th, ph = naive_step(s, traj.theta[n], traj.phi[n], traj.v[n],
                            traj.forcing[n])
        assert s.grid.l2_norm(th - traj.theta[n + 1]) < 1e-8
        assert s.grid.l2_norm(ph - traj.phi[n + 1]) < 1e-8


@pytest.mark.parametrize('elliptic', ['dct', 'cg'])
def test_step_postconditions(elliptic):
    s = small_scenario(N=12, cells=20)
    traj = solve_trajectory(s, elliptic=elliptic)
    assert np.max(traj.residuals) <= 1e-9
    h = s.h
    for n in range(1, s.N + 1):
        np.testing.assert_allclose(traj.v[n],
                                   (traj.phi[n] - traj.phi[n - 1]) / h,
                                   rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(traj.z[n], (traj.v[n] - traj.v[n - 1]) / h,
                                   rtol=1e-12, atol=1e-12)


def test_trajectory_shapes_and_single_step():
    s = small_scenario(N=1)
    traj = solve_trajectory(s)
    assert traj.theta.shape == (2, 16) and traj.forcing.shape == (1, 16)
    assert traj.z0_unset and np.all(traj.z[0] == 0)
    stepper = _stepper(s)
    st0 = StepState(0, *s.initial_fields(), s.grid.zeros())
    one = stepper.step(st0, traj.forcing[0])
    np.testing.assert_array_equal(one.theta, traj.theta[1])


def test_zero_scenario_trajectory_is_zero(zero_scenario):
    traj = solve_trajectory(zero_scenario)
    for q in Trajectory.QUANTITIES:
        assert np.all(traj.nodes(q) == 0.0)


def test_step_error_carries_index(monkeypatch):
    s = small_scenario(N=6)
    import nlphase.scheme as scheme

    real = scheme.resolvent_field
    calls = {'n': 0}

    def flaky(g, h, nl):
        calls['n'] += 1
        if calls['n'] == 4:
            raise ArithmeticError('boom')
        return real(g, h, nl)

    monkeypatch.setattr(scheme, 'resolvent_field', flaky)
    with pytest.raises(StepError) as exc:
        solve_trajectory(s)
    assert exc.value.n == 3 and 'step 3' in str(exc.value)


def test_two_dimensional_run():
    g = Grid((1.0, 0.5), (12, 8))
    s = Scenario(g, T=0.2, N=8, kernel=KernelSpec('gaussian', width=0.2),
                 nl=Nonlinearity.cubic(1.0, 1.0, 0.2),
                 forcing=Forcing(FieldPreset('cos', amplitude=1.0), 'sin',
                                 omega=2.0),
                 phi0=FieldPreset('gaussian', amplitude=1.0, width=0.15),
                 v0=FieldPreset('constant', offset=0.1))
    traj = solve_trajectory(s)
    assert np.max(traj.residuals) < 1e-9


# -- interpolants -------------------------------------------------------------

@pytest.fixture
def traj(rng):
    N = 6
    theta = rng.normal(size=(N + 1, 5))
    phi = rng.normal(size=(N + 1, 5))
    return Trajectory.from_nodes(Grid((1.0,), (5,)), 0.6, theta, phi,
                                 rng.normal(size=5),
                                 forcing=rng.normal(size=(N, 5)))


def test_hat_nodes_and_midpoints(traj):
    h = traj.h
    assert np.array_equal(eval_hat(traj, 'theta', 0.0), traj.theta[0])
    for n in range(traj.N + 1):
        for q in ('theta', 'phi', 'v'):
            assert np.array_equal(eval_hat(traj, q, n * h), traj.nodes(q)[n])
    for n in range(traj.N):
        np.testing.assert_allclose(
            eval_hat(traj, 'theta', (n + 0.5) * h),
            0.5 * (traj.theta[n] + traj.theta[n + 1]), rtol=1e-13,
            atol=1e-15)
        np.testing.assert_allclose(hat_slope(traj, 'phi', (n + 0.3) * h),
                                   traj.v[n + 1], rtol=1e-12)


def test_bar_and_underline_conventions(traj):
    h = traj.h
    for n in range(traj.N):
        right = (n + 1) * h
        assert np.array_equal(eval_bar(traj, 'theta', right),
                              traj.theta[n + 1])
        just_above = n * h + 1e-6 * h
        assert np.array_equal(eval_bar(traj, 'theta', just_above),
                              traj.theta[n + 1])
        assert np.array_equal(eval_underline(traj, 'theta', just_above),
                              traj.theta[n])
        t = (n + 0.77) * h
        assert np.array_equal(eval_bar(traj, 'f', t), traj.forcing[n])
        assert np.array_equal(eval_bar(traj, 'z', t), traj.z[n + 1])
    # right-continuous extension at t = 0
    assert np.array_equal(eval_bar(traj, 'phi', 0.0), traj.phi[1])
    assert np.array_equal(eval_underline(traj, 'phi', 0.0), traj.phi[0])


def test_interpolant_errors(traj):
    with pytest.raises(ValueError):
        eval_hat(traj, 'theta', traj.T * 1.01)
    with pytest.raises(ValueError):
        eval_hat(traj, 'z', 0.1)
    with pytest.raises(ValueError):
        eval_underline(traj, 'v', 0.1)
    with pytest.raises(ValueError):
        eval_bar(traj, 'theta', -0.1)
