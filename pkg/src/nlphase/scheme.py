"""Backward-Euler-type time stepping for the nonlocal phase-field system

    theta_t + phi_t - lap theta = f,
    phi_tt + phi_t + a phi - J * phi + beta(phi) + pi(phi) = theta,

with homogeneous Neumann data for ``theta``.  One step solves

    phi_{n+1} = R_h(g_n),   g_n = h^2 theta_n + (1 + h) phi_n + h v_n
                                  - h^2 a phi_n + h^2 (J * phi_n),
    (I - h lap_h) theta_{n+1} = h f_{n+1} + phi_n - phi_{n+1} + theta_n,

where ``R_h`` is the pointwise resolvent of :mod:`nlphase.resolvent`.
"""
import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .elliptic import HelmholtzProblem, helmholtz_solve
from .grid import Grid
from .kernel import Kernel, KernelSpec
from .resolvent import Nonlinearity, check_step, resolvent_field

__all__ = ('FieldPreset', 'Forcing', 'Scenario', 'StepState', 'Stepper',
           'Trajectory', 'StepError', 'average_forcing', 'solve_trajectory',
           'eval_hat', 'eval_bar', 'eval_underline', 'hat_slope')

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(3)


class StepError(RuntimeError):
    """A step of the scheme failed; ``n`` is the index of the failing step."""

    def __init__(self, n, cause):
        super().__init__('step {} -> {} failed: {}'.format(n, n + 1, cause))
        self.n = n
        self.cause = cause


@dataclass(frozen=True)
class FieldPreset:
    """Analytic initial/forcing profile sampled at cell centers.

    kinds
        ``zero``; ``constant`` (``offset``); ``cos``
        (``offset + amplitude * prod_i cos(mode pi x_i / L_i)``);
        ``gaussian`` (``offset + amplitude * exp(-|x - c|^2 / (2 width^2))``,
        ``c`` the box center); ``array`` (``values``, flattened row-major).
    """

    kind: str = 'zero'
    amplitude: float = 0.0
    offset: float = 0.0
    mode: int = 1
    width: float = 0.1
    values: tuple = field(default=(), repr=False)

    KINDS = ('zero', 'constant', 'cos', 'gaussian', 'array')

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError('unknown field preset {!r}, expected one of {}'
                             .format(self.kind, self.KINDS))
        object.__setattr__(self, 'values',
                           tuple(float(x) for x in np.ravel(self.values)))
        for name in ('amplitude', 'offset', 'width'):
            if not np.isfinite(getattr(self, name)):
                raise ValueError('{} must be finite'.format(name))

    @classmethod
    def from_array(cls, values):
        return cls(kind='array', values=tuple(np.ravel(values)))

    def sample(self, grid):
        if self.kind == 'zero':
            return grid.zeros()
        if self.kind == 'constant':
            return grid.constant(self.offset)
        if self.kind == 'array':
            if len(self.values) != int(np.prod(grid.shape)):
                raise ValueError('array preset has {} values, grid has {} '
                                 'cells'.format(len(self.values),
                                                int(np.prod(grid.shape))))
            return grid.check(np.reshape(self.values, grid.shape))
        X = grid.mesh()
        if self.kind == 'cos':
            prof = np.ones(grid.shape)
            for x, L in zip(X, grid.lengths):
                prof = prof * np.cos(self.mode * np.pi * x / L)
        else:
            r2 = sum((x - c)**2 for x, c in zip(X, grid.center))
            prof = np.exp(-r2 / (2.0 * self.width**2))
        return self.offset + self.amplitude * prof


@dataclass(frozen=True)
class Forcing:
    """Separable forcing ``f(x, t) = S(x) T(t)``.

    ``temporal`` is ``'poly'`` (``T(t) = sum_k coeffs[k] t^k``), ``'cos'`` or
    ``'sin'`` (``T(t) = cos(omega t)`` / ``sin(omega t)``).
    """

    spatial: FieldPreset = FieldPreset()
    temporal: str = 'poly'
    coeffs: tuple = (1.0,)
    omega: float = 1.0

    def __post_init__(self):
        if self.temporal not in ('poly', 'cos', 'sin'):
            raise ValueError('unknown temporal profile {!r}'
                             .format(self.temporal))
        object.__setattr__(self, 'coeffs',
                           tuple(float(c) for c in self.coeffs))

    @classmethod
    def constant(cls, value):
        return cls(spatial=FieldPreset('constant', offset=value))

    def time_factor(self, t):
        t = np.asarray(t, dtype=float)
        if self.temporal == 'poly':
            return np.polynomial.polynomial.polyval(t, self.coeffs)
        if self.temporal == 'cos':
            return np.cos(self.omega * t)
        return np.sin(self.omega * t)

    def at(self, grid, t):
        return self.spatial.sample(grid) * float(self.time_factor(t))


def average_forcing(forcing, grid, k, h):
    """``f_k = (1/h) int_{(k-1)h}^{kh} f dt``, 3-point Gauss-Legendre in time.

    Exact for polynomial time factors up to degree 5.
    """
    if k < 1:
        raise ValueError('forcing averages are indexed from k = 1')
    mid = (k - 0.5) * h
    # normalise by the weight sum so constants average exactly
    tavg = float(np.sum(
        _GL_WEIGHTS * forcing.time_factor(mid + 0.5 * h * _GL_NODES))
        / np.sum(_GL_WEIGHTS))
    return forcing.spatial.sample(grid) * tavg


@dataclass(frozen=True)
class Scenario:
    """Complete problem data: box, horizon, step count and coefficients."""

    grid: Grid
    T: float = 1.0
    N: int = 64
    kernel: KernelSpec = KernelSpec()
    nl: Nonlinearity = Nonlinearity()
    forcing: Forcing = Forcing.constant(0.0)
    theta0: FieldPreset = FieldPreset()
    phi0: FieldPreset = FieldPreset()
    v0: FieldPreset = FieldPreset()

    def __post_init__(self):
        if not (np.isfinite(self.T) and self.T > 0):
            raise ValueError('final time T must be finite and positive')
        if int(self.N) != self.N or self.N < 1:
            raise ValueError('step count N must be a positive integer')
        object.__setattr__(self, 'N', int(self.N))
        check_step(self.h, self.nl)
        for name in ('theta0', 'phi0', 'v0'):
            u = self.grid.check(getattr(self, name).sample(self.grid), name)
            if name == 'theta0' and not np.isfinite(self.grid.v_norm(u)):
                raise ValueError('theta0 must have finite V norm')

    @property
    def h(self):
        return self.T / self.N

    def with_steps(self, N):
        return dataclasses.replace(self, N=int(N))

    def initial_fields(self):
        return tuple(getattr(self, name).sample(self.grid)
                     for name in ('theta0', 'phi0', 'v0'))


@dataclass(frozen=True, eq=False)
class StepState:
    n: int
    theta: np.ndarray
    phi: np.ndarray
    v: np.ndarray
    z: np.ndarray


class Stepper:
    """One step of the scheme for fixed coefficients and step size.

    Parameters
    ----------
    grid : Grid
    h : float
    kernel : Kernel
    nl : Nonlinearity
    elliptic : {'dct', 'cg'}
        Route for the Helmholtz solve.
    """

    def __init__(self, grid, h, kernel, nl, elliptic='dct'):
        check_step(h, nl)
        self.grid, self.h, self.kernel, self.nl = grid, h, kernel, nl
        self.elliptic = elliptic

    def phi_rhs(self, state):
        h = self.h
        return (h * h * state.theta + (1.0 + h) * state.phi + h * state.v
                - h * h * self.kernel.a * state.phi
                + h * h * self.kernel.convolve(state.phi))

    def step(self, prev, f_next):
        """Advance ``prev`` (state ``n``) to state ``n + 1``.

        ``f_next`` is the forcing average ``f_{n+1}``.
        """
        h = self.h
        try:
            phi = resolvent_field(self.phi_rhs(prev), h, self.nl)
            v = (phi - prev.phi) / h
            z = (v - prev.v) / h
            rhs = h * f_next + prev.phi - phi + prev.theta
            theta = helmholtz_solve(HelmholtzProblem(self.grid, h, rhs),
                                    method=self.elliptic)
            for name, u in (('theta', theta), ('phi', phi), ('v', v),
                            ('z', z)):
                self.grid.check(u, name)
        except (ArithmeticError, ValueError) as exc:
            raise StepError(prev.n, exc) from exc
        return StepState(prev.n + 1, theta, phi, v, z)

    def residuals(self, prev, new, f_next):
        """H norms of the two equations of the original (unreduced) step."""
        g, h = self.grid, self.h
        r1 = ((new.theta - prev.theta) / h + new.v
              - g.neumann_laplacian(new.theta) - f_next)
        r2 = (new.z + new.v + self.kernel.nonlocal_term(prev.phi)
              + self.nl.beta_fn(new.phi) + self.nl.pi_fn(new.phi)
              - prev.theta)
        return g.l2_norm(r1), g.l2_norm(r2)


class Trajectory:
    """Node values ``(theta_n, phi_n, v_n, z_n)``, ``n = 0..N``.

    ``z[0]`` is never defined by the scheme; it is stored as zeros and
    ``z0_unset`` is True.  ``forcing[k - 1]`` holds ``f_k``.
    """

    QUANTITIES = ('theta', 'phi', 'v', 'z')

    def __init__(self, grid, T, theta, phi, v, z, forcing, scenario=None,
                 residuals=None):
        self.grid = grid
        self.T = float(T)
        self.theta = np.asarray(theta, dtype=float)
        self.phi = np.asarray(phi, dtype=float)
        self.v = np.asarray(v, dtype=float)
        self.z = np.asarray(z, dtype=float)
        self.forcing = np.asarray(forcing, dtype=float)
        self.scenario = scenario
        self.residuals = residuals
        self.z0_unset = True
        N = self.theta.shape[0] - 1
        for name in self.QUANTITIES:
            if getattr(self, name).shape != (N + 1,) + grid.shape:
                raise ValueError('{} has inconsistent shape'.format(name))
        if self.forcing.shape != (N,) + grid.shape:
            raise ValueError('forcing averages must have shape (N, *grid)')

    @classmethod
    def from_nodes(cls, grid, T, theta, phi, v0, forcing=None):
        """Build a trajectory from arbitrary node data.

        ``v`` and ``z`` follow from ``phi`` and ``v0`` by the difference
        quotients of the scheme.
        """
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        N = phi.shape[0] - 1
        h = T / N
        v = np.empty_like(phi)
        v[0] = v0
        v[1:] = np.diff(phi, axis=0) / h
        z = np.zeros_like(phi)
        z[1:] = np.diff(v, axis=0) / h
        if forcing is None:
            forcing = np.zeros((N,) + grid.shape)
        return cls(grid, T, theta, phi, v, z, forcing)

    @property
    def N(self):
        return self.theta.shape[0] - 1

    @property
    def h(self):
        return self.T / self.N

    @property
    def times(self):
        return np.arange(self.N + 1) * self.h

    def nodes(self, quantity):
        if quantity == 'f':
            return self.forcing
        if quantity not in self.QUANTITIES:
            raise ValueError('unknown quantity {!r}'.format(quantity))
        return getattr(self, quantity)

    def state(self, n):
        return StepState(n, self.theta[n], self.phi[n], self.v[n], self.z[n])

    def bar_nodes(self, quantity):
        """Values of the right-constant interpolant on intervals 1..N."""
        return self.forcing if quantity == 'f' else self.nodes(quantity)[1:]

    def underline_nodes(self, quantity):
        return self.nodes(quantity)[:-1]


def solve_trajectory(s, plan='auto', elliptic='dct', record_residuals=True):
    """Run all ``N`` steps of the scheme for scenario ``s``."""
    grid, h = s.grid, s.h
    kernel = Kernel(s.kernel, grid, plan=plan)
    stepper = Stepper(grid, h, kernel, s.nl, elliptic=elliptic)
    theta0, phi0, v0 = s.initial_fields()
    shape = (s.N + 1,) + grid.shape
    out = {name: np.empty(shape) for name in Trajectory.QUANTITIES}
    forcing = np.empty((s.N,) + grid.shape)
    residuals = np.zeros((s.N, 2)) if record_residuals else None
    state = StepState(0, theta0, phi0, v0, grid.zeros())
    for name in Trajectory.QUANTITIES:
        out[name][0] = getattr(state, name)
    for n in range(s.N):
        forcing[n] = average_forcing(s.forcing, grid, n + 1, h)
        new = stepper.step(state, forcing[n])
        if record_residuals:
            residuals[n] = stepper.residuals(state, new, forcing[n])
        for name in Trajectory.QUANTITIES:
            out[name][n + 1] = getattr(new, name)
        state = new
    return Trajectory(grid, s.T, out['theta'], out['phi'], out['v'],
                      out['z'], forcing, scenario=s, residuals=residuals)


# -- interpolants -------------------------------------------------------------

_SNAP = 1e-10


def _check_time(traj, t):
    if not (-_SNAP * traj.T <= t <= traj.T * (1 + _SNAP)):
        raise ValueError('t = {} outside [0, {}]'.format(t, traj.T))


def _hat_interval(traj, t):
    x = t / traj.h
    m = round(x)
    if abs(x - m) <= _SNAP:
        return None, int(m)
    n = min(int(np.floor(x)), traj.N - 1)
    return n, (t - n * traj.h) / traj.h


def eval_hat(traj, quantity, t):
    """Piecewise-linear interpolant of ``theta``, ``phi`` or ``v`` at ``t``."""
    if quantity not in ('theta', 'phi', 'v'):
        raise ValueError('hat interpolant is defined for theta, phi, v')
    _check_time(traj, t)
    u = traj.nodes(quantity)
    n, s = _hat_interval(traj, t)
    if n is None:
        return u[s].copy()
    return u[n] + (u[n + 1] - u[n]) * s


def hat_slope(traj, quantity, t):
    """Time derivative of the hat interpolant on the interval holding ``t``.

    At a node the interval to the right is used (left one at ``t = T``).
    """
    _check_time(traj, t)
    u = traj.nodes(quantity)
    n, s = _hat_interval(traj, t)
    if n is None:
        n = min(s, traj.N - 1)
    return (u[n + 1] - u[n]) / traj.h


def _bar_index(traj, t):
    """Index ``n`` with ``t in (nh, (n+1)h]``; ``t = 0`` maps to ``n = 0``."""
    x = t / traj.h
    m = round(x)
    if abs(x - m) <= _SNAP:
        return max(int(m) - 1, 0)
    return min(int(np.ceil(x)) - 1, traj.N - 1)


def eval_bar(traj, quantity, t):
    """Right-constant interpolant: ``u_{n+1}`` on ``(nh, (n+1)h]``.

    At ``t = 0`` the value of the first interval is returned.
    """
    if quantity not in ('theta', 'phi', 'v', 'z', 'f'):
        raise ValueError('bar interpolant is defined for theta, phi, v, z, f')
    _check_time(traj, t)
    return traj.bar_nodes(quantity)[_bar_index(traj, t)].copy()


def eval_underline(traj, quantity, t):
    """Left-constant interpolant: ``u_n`` on ``(nh, (n+1)h]``."""
    if quantity not in ('theta', 'phi'):
        raise ValueError('underline interpolant is defined for theta, phi')
    _check_time(traj, t)
    return traj.underline_nodes(quantity)[_bar_index(traj, t)].copy()
