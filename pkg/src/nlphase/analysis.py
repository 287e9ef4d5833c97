"""Uniform-in-h monitors, Cauchy differences and convergence studies.

Every time norm is evaluated exactly from node data: bar/underline
functions are constant on each interval and hat functions are linear, and
two nested partitions are compared on the finer one, where both sides are
again piecewise polynomial.
"""
import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .scheme import solve_trajectory
from .timenorms import linear_sq_integral, linear_sup, linf_linear_sq_integral

__all__ = ('EstimateReport', 'ErrorMetrics', 'RateTable',
           'IncompatibleTrajectoriesError', 'apriori_report',
           'discrete_error', 'cauchy_check', 'forcing_gap',
           'cauchy_constant', 'convergence_study', 'fit_rate')


class IncompatibleTrajectoriesError(ValueError):
    pass


def _norms_sq(grid, u):
    """Per-node squared H norms of a stack of fields."""
    return grid.cell_volume * np.sum(u.reshape(u.shape[0], -1)**2, axis=1)


def _inner(grid, u, w):
    return grid.cell_volume * np.sum(
        (u * w).reshape(u.shape[0], -1), axis=1)


def _grad_sq(grid, u):
    axes = tuple(range(1, u.ndim))
    total = np.zeros(u.shape[0])
    for ax, dx in enumerate(grid.spacing):
        g = np.diff(u, axis=ax + 1) / dx
        total += np.sum(g * g, axis=axes)
    return grid.cell_volume * total


def _linf(u):
    return np.max(np.abs(u.reshape(u.shape[0], -1)), axis=1)


def _lap_sq(grid, u):
    return np.array([grid.l2_norm(grid.neumann_laplacian(x))**2 for x in u])


@dataclass(frozen=True)
class EstimateReport:
    """Discrete counterparts of the uniform bounds, for one step size.

    E1  sup|v|_H^2 + sup|phi|_H^2 + |theta_t|_{L2 H}^2 + sup|theta|_V^2
    E2  |lap_h theta_bar|_{L2(0,T;H)}
    E3  sup|v|_inf^2 + sup|phi|_inf^2           (space-time sup)
    E4  |z_bar|_{L2(0,T;Linf)}^2
    E5  |z_bar|_{Linf(0,T;H)}^2
    E6  sum of the norms of theta_hat in H1(H) and Linf(V), phi_hat in
        W1,inf(Linf), v_hat in W1,inf(H), W1,2(Linf) and Linf(Linf)
    E_under  sup|phi_under|_inf^2 + sup|theta_under|_V^2
             + |theta_under|_{L2 Linf}^2
    """

    h: float
    E1: float
    E2: float
    E3: float
    E4: float
    E5: float
    E6: float
    E_under: float

    TERMS = ('E1', 'E2', 'E3', 'E4', 'E5', 'E6')

    def as_dict(self):
        return dataclasses.asdict(self)


def apriori_report(traj):
    """Evaluate the monitored quantities on one trajectory."""
    g, h = traj.grid, traj.h
    th, ph, v, z = traj.theta, traj.phi, traj.v, traj.z
    dth = np.diff(th, axis=0) / h
    th_V2 = _norms_sq(g, th) + _grad_sq(g, th)

    E1 = (np.max(_norms_sq(g, v[1:])) + np.max(_norms_sq(g, ph[1:]))
          + h * np.sum(_norms_sq(g, dth)) + np.max(th_V2[1:]))
    E2 = math.sqrt(h * np.sum(_lap_sq(g, th[1:])))
    E3 = np.max(_linf(v[1:]))**2 + np.max(_linf(ph[1:]))**2
    E4 = h * np.sum(_linf(z[1:])**2)
    E5 = np.max(_norms_sq(g, z[1:]))

    th_H2 = _norms_sq(g, th)
    hat_L2 = h * np.sum(linear_sq_integral(th_H2[:-1], th_H2[1:],
                                           _inner(g, th[:-1], th[1:])))
    theta_part = (math.sqrt(hat_L2 + h * np.sum(_norms_sq(g, dth)))
                  + math.sqrt(np.max(th_V2)))
    phi_part = np.max(_linf(ph)) + np.max(_linf(v[1:]))
    v_linf_sq = h * sum(linf_linear_sq_integral(v[n], v[n + 1])
                        for n in range(traj.N))
    v_part = (math.sqrt(np.max(_norms_sq(g, v)))
              + math.sqrt(np.max(_norms_sq(g, z[1:])))
              + math.sqrt(v_linf_sq + h * np.sum(_linf(z[1:])**2))
              + np.max(_linf(v)))
    E6 = theta_part + phi_part + v_part

    E_under = (np.max(_linf(ph[:-1]))**2 + np.max(th_V2[:-1])
               + h * np.sum(_linf(th[:-1])**2))
    return EstimateReport(h, *(float(x) for x in
                               (E1, E2, E3, E4, E5, E6, E_under)))


@dataclass(frozen=True)
class ErrorMetrics:
    """The five error terms between two nested trajectories and their sum."""

    h: float
    h_ref: float
    eV_sup: float
    eV_L2: float
    ePhi_sup: float
    eTheta_sup: float
    eGrad_L2: float

    COLUMNS = ('eV_sup', 'eV_L2', 'ePhi_sup', 'eTheta_sup', 'eGrad_L2')

    @property
    def total(self):
        return (self.eV_sup + self.eV_L2 + self.ePhi_sup + self.eTheta_sup
                + self.eGrad_L2)


def _check_compatible(a, b):
    if a.grid != b.grid or not math.isclose(a.T, b.T, rel_tol=1e-14):
        raise IncompatibleTrajectoriesError(
            'trajectories live on different grids or horizons')
    if a.scenario is not None and b.scenario is not None:
        if a.scenario != b.scenario.with_steps(a.N):
            raise IncompatibleTrajectoriesError(
                'trajectories come from different scenarios')
    coarse, fine = (a, b) if a.N <= b.N else (b, a)
    if fine.N % coarse.N:
        raise IncompatibleTrajectoriesError(
            'step counts {} and {} are not nested'.format(coarse.N, fine.N))
    return coarse, fine, fine.N // coarse.N


def _hat_on_fine(u, r):
    """Coarse piecewise-linear node data evaluated at the fine nodes."""
    Nc = u.shape[0] - 1
    k = np.arange(Nc * r + 1)
    n = np.minimum(k // r, Nc - 1)
    s = ((k - n * r) / r).reshape((-1,) + (1,) * (u.ndim - 1))
    return u[n] + (u[n + 1] - u[n]) * s


def _bar_on_fine(u_bar, r):
    """Coarse right-constant values on the fine intervals."""
    return np.repeat(u_bar, r, axis=0)


def discrete_error(coarse, ref):
    """Error terms of ``coarse`` measured against the nested ``ref``.

    The arguments may come in either order; the finer partition is used for
    all time norms.
    """
    c, f, r = _check_compatible(coarse, ref)
    g, tau = f.grid, f.h

    def sup_hat(q):
        d = _hat_on_fine(c.nodes(q), r) - f.nodes(q)
        return float(np.sqrt(np.max(_norms_sq(g, d))))

    dv = _bar_on_fine(c.bar_nodes('v'), r) - f.bar_nodes('v')
    dth = _bar_on_fine(c.bar_nodes('theta'), r) - f.bar_nodes('theta')
    return ErrorMetrics(
        h=c.h, h_ref=f.h,
        eV_sup=sup_hat('v'),
        eV_L2=float(np.sqrt(tau * np.sum(_norms_sq(g, dv)))),
        ePhi_sup=sup_hat('phi'),
        eTheta_sup=sup_hat('theta'),
        eGrad_L2=float(np.sqrt(tau * np.sum(_grad_sq(g, dth)))))


def cauchy_check(ta, tb):
    """Left-hand side of the Cauchy estimate between two step sizes."""
    return discrete_error(ta, tb).total


def forcing_gap(ta, tb):
    """``|f_bar_h - f_bar_tau|_{L2(0,T;H)}`` for nested partitions."""
    c, f, r = _check_compatible(ta, tb)
    d = _bar_on_fine(c.forcing, r) - f.forcing
    return float(np.sqrt(f.h * np.sum(_norms_sq(f.grid, d))))


def cauchy_constant(ta, tb):
    """Smallest ``C`` with ``lhs <= C (h^1/2 + tau^1/2 + forcing gap)``."""
    denom = math.sqrt(ta.h) + math.sqrt(tb.h) + forcing_gap(ta, tb)
    return cauchy_check(ta, tb) / denom


@dataclass
class RateTable:
    """Errors against a reference and the fitted log-log rate.

    ``slope`` and ``intercept`` come from a least-squares fit of
    ``log(total)`` against ``log(h)``; ``M_hat`` is the smallest ``M`` with
    ``total <= M h^{1/2}`` on every row.  ``degenerate`` is set when no fit
    is possible (fewer than two rows or a zero error).
    """

    N_ref: int
    rows: list
    slope: float = float('nan')
    intercept: float = float('nan')
    M_hat: float = float('nan')
    degenerate: bool = True
    inversions: list = field(default_factory=list)

    @property
    def h(self):
        return np.array([m.h for m in self.rows])

    @property
    def totals(self):
        return np.array([m.total for m in self.rows])

    def monotone(self, max_inversions=1, max_increase=0.10):
        """Errors nonincreasing in ``h`` up to a bounded tail inversion."""
        if len(self.inversions) > max_inversions:
            return False
        return all(inc < max_increase for _, inc in self.inversions)

    def to_csv(self):
        cols = ('h',) + ErrorMetrics.COLUMNS + ('total',)
        lines = [','.join(cols)]
        for m in self.rows:
            vals = [m.h] + [getattr(m, c) for c in ErrorMetrics.COLUMNS]
            lines.append(','.join(repr(float(x)) for x in vals + [m.total]))
        if self.degenerate:
            lines.append('# slope=nan M_hat=nan degenerate=1 N_ref={}'
                         .format(self.N_ref))
        else:
            lines.append('# slope={!r} M_hat={!r} degenerate=0 N_ref={}'
                         .format(self.slope, self.M_hat, self.N_ref))
        return '\n'.join(lines) + '\n'


def fit_rate(rows, N_ref):
    rows = sorted(rows, key=lambda m: -m.h)
    table = RateTable(N_ref=N_ref, rows=rows)
    totals = table.totals
    for i in range(1, len(rows)):
        if totals[i] > totals[i - 1]:
            table.inversions.append(
                (i, float(totals[i] / totals[i - 1] - 1.0)))
    if len(rows) >= 2 and np.all(totals > 0):
        hs = table.h
        table.slope, table.intercept = (
            float(x) for x in np.polyfit(np.log(hs), np.log(totals), 1))
        table.M_hat = float(np.max(totals / np.sqrt(hs)))
        table.degenerate = False
    return table


def convergence_study(s, N_list, N_ref, plan='auto', elliptic='dct',
                      reference=None):
    """Errors of the scheme at each ``N`` against a run with ``N_ref`` steps.

    Parameters
    ----------
    s : Scenario
    N_list : sequence of int
        Coarse step counts, each dividing ``N_ref``.
    N_ref : int
    reference : Trajectory, optional
        Precomputed reference run with ``N_ref`` steps.
    """
    N_list = sorted(set(int(n) for n in N_list))
    bad = [n for n in N_list if N_ref % n]
    if bad:
        raise IncompatibleTrajectoriesError(
            'N_ref = {} is not a multiple of {}'.format(N_ref, bad))
    if reference is None:
        reference = solve_trajectory(s.with_steps(N_ref), plan=plan,
                                     elliptic=elliptic,
                                     record_residuals=False)
    rows = [discrete_error(solve_trajectory(s.with_steps(n), plan=plan,
                                            elliptic=elliptic,
                                            record_residuals=False),
                           reference)
            for n in N_list]
    return fit_rate(rows, N_ref)
