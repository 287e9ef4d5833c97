"""Named invariant checks on a computed trajectory.

Each check returns a :class:`CheckResult` with the measured residual and the
tolerance it is held to.  :func:`run_checks` drives the full suite.
"""
from dataclasses import dataclass

import numpy as np

from .analysis import apriori_report
from .kernel import Kernel
from .scheme import (Stepper, eval_bar, eval_hat, eval_underline)
from .timenorms import linear_sq_integral, linear_sup

__all__ = ('CheckResult', 'interpolant_identities', 'mass_balance',
           'subdifferential_slack', 'scheme_residuals', 'run_checks')

TINY = 1e-300


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tol: float

    @property
    def passed(self):
        return bool(np.isfinite(self.residual) and self.residual <= self.tol)

    def line(self):
        return '{:<28s} {:>12.3e}  (tol {:.0e})  {}'.format(
            self.name, self.residual, self.tol,
            'PASS' if self.passed else 'FAIL')


def _rel(lhs, rhs):
    lhs, rhs = float(lhs), float(rhs)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), TINY)


def interpolant_identities(traj):
    """Relative residuals of the eight interpolant identities.

    Left-hand sides go through the interpolant evaluators; right-hand sides
    use node formulas.  Returns ``{name: residual}``; identities with two
    equalities report the worse of the two.
    """
    g, h, N = traj.grid, traj.h, traj.N
    t = traj.times

    def hat_ends(q, n):
        return eval_hat(traj, q, t[n]), eval_hat(traj, q, t[n + 1])

    def mid(n):
        return t[n] + 0.5 * h

    out = {}

    # sup of hat functions in V, Linf, Linf
    sup_V = 0.0
    for n in range(N):
        a, b = hat_ends('theta', n)
        sup_V = max(sup_V, float(linear_sup(g.v_norm_sq(a), g.v_norm_sq(b),
                                            g.l2_inner(a, b)
                                            + _grad_inner(g, a, b))))
    rhs = max(g.v_norm(traj.theta[0]),
              max(g.v_norm(u) for u in traj.theta[1:]))
    out['hat_theta_sup_V'] = _rel(sup_V, rhs)
    for q, name in (('phi', 'hat_phi_sup_Linf'), ('v', 'hat_v_sup_Linf')):
        lhs = max(max(g.linf_norm(x) for x in hat_ends(q, n))
                  for n in range(N))
        nodes = traj.nodes(q)
        rhs = max(g.linf_norm(nodes[0]),
                  max(g.linf_norm(u) for u in nodes[1:]))
        out[name] = _rel(lhs, rhs)

    # bar minus hat, L2(0,T;H)
    lhs = 0.0
    slope_sq = 0.0
    for n in range(N):
        bar = eval_bar(traj, 'theta', mid(n))
        d0, d1 = (bar - x for x in hat_ends('theta', n))
        lhs += h * linear_sq_integral(g.l2_inner(d0, d0), g.l2_inner(d1, d1),
                                      g.l2_inner(d0, d1))
        dq = (traj.theta[n + 1] - traj.theta[n]) / h
        slope_sq += h * g.l2_inner(dq, dq)
    out['bar_hat_theta_L2H'] = _rel(lhs, h * h / 3.0 * slope_sq)

    # bar minus hat for phi in Linf(Linf), v in Linf(H)
    lhs = max(max(g.linf_norm(eval_bar(traj, 'phi', mid(n)) - x)
                  for x in hat_ends('phi', n)) for n in range(N))
    slope = max(g.linf_norm(_quarter_slope(traj, 'phi', n))
                for n in range(N))
    vbar = max(g.linf_norm(eval_bar(traj, 'v', mid(n))) for n in range(N))
    out['bar_hat_phi_LinfLinf'] = max(_rel(lhs, h * slope),
                                      _rel(lhs, h * vbar))
    lhs = 0.0
    for n in range(N):
        bar = eval_bar(traj, 'v', mid(n))
        d0, d1 = (bar - x for x in hat_ends('v', n))
        lhs = max(lhs, float(linear_sup(g.l2_inner(d0, d0),
                                        g.l2_inner(d1, d1),
                                        g.l2_inner(d0, d1))))
    slope = max(g.l2_norm(_quarter_slope(traj, 'v', n)) for n in range(N))
    zbar = max(g.l2_norm(eval_bar(traj, 'z', mid(n))) for n in range(N))
    out['bar_hat_v_LinfH'] = max(_rel(lhs, h * slope), _rel(lhs, h * zbar))

    # h * hat_t = bar - underline
    for q, name in (('theta', 'jump_theta'), ('phi', 'jump_phi')):
        worst = 0.0
        for n in range(N):
            bar = eval_bar(traj, q, mid(n))
            under = eval_underline(traj, q, mid(n))
            diff = h * _quarter_slope(traj, q, n) - (bar - under)
            scale = max(g.linf_norm(bar) + g.linf_norm(under), TINY)
            worst = max(worst, g.linf_norm(diff) / scale)
        out[name] = worst
    return out


def _grad_inner(g, a, b):
    return g.cell_volume * float(sum(
        np.sum(x * y) for x, y in zip(g.face_gradients(a),
                                      g.face_gradients(b))))


def _quarter_slope(traj, q, n):
    """Slope of the hat interpolant from two interior evaluations."""
    t1 = traj.times[n] + 0.25 * traj.h
    t3 = traj.times[n] + 0.75 * traj.h
    return (eval_hat(traj, q, t3) - eval_hat(traj, q, t1)) / (t3 - t1)


def mass_balance(traj):
    """Per-step relative mass defect of ``int(theta + phi)``."""
    g, h = traj.grid, traj.h
    mass = np.array([g.integrate(a + b) for a, b in zip(traj.theta,
                                                        traj.phi)])
    supply = np.array([h * g.integrate(f) for f in traj.forcing])
    scale = 1.0 + np.abs([g.integrate(a) + g.integrate(b) for a, b in
                          zip(traj.theta[:-1], traj.phi[:-1])])
    return np.abs(np.diff(mass) - supply) / scale


def subdifferential_slack(traj, nl):
    """``(beta(phi_{n+1}), phi_{n+1} - phi_n)_H - int betahat(phi_{n+1})
    + int betahat(phi_n)`` per step; nonnegative by convexity."""
    g = traj.grid
    out = np.empty(traj.N)
    for n in range(traj.N):
        a, b = traj.phi[n + 1], traj.phi[n]
        out[n] = (g.l2_inner(nl.beta_fn(a), a - b)
                  - g.integrate(nl.betahat(a)) + g.integrate(nl.betahat(b)))
    return out


def scheme_residuals(traj, scenario=None, plan='auto'):
    """Recompute both equation residuals at every step, shape ``(N, 2)``."""
    s = scenario or traj.scenario
    if s is None:
        raise ValueError('scheme residuals need the scenario coefficients')
    kernel = Kernel(s.kernel, traj.grid, plan=plan)
    stepper = Stepper(traj.grid, traj.h, kernel, s.nl)
    return np.array([stepper.residuals(traj.state(n), traj.state(n + 1),
                                       traj.forcing[n])
                     for n in range(traj.N)])


def _quotient_defect(traj):
    h = traj.h
    dv = traj.v[1:] - np.diff(traj.phi, axis=0) / h
    dz = traj.z[1:] - np.diff(traj.v, axis=0) / h
    scale_v = max(np.max(np.abs(traj.v[1:])), TINY)
    scale_z = max(np.max(np.abs(traj.z[1:])), TINY)
    return max(np.max(np.abs(dv)) / scale_v, np.max(np.abs(dz)) / scale_z)


def run_checks(traj, scenario=None):
    """Run the invariant suite; returns a list of :class:`CheckResult`."""
    s = scenario or traj.scenario
    res = scheme_residuals(traj, s)
    results = [
        CheckResult('scheme_residual_theta', float(np.max(res[:, 0])), 1e-9),
        CheckResult('scheme_residual_phi', float(np.max(res[:, 1])), 1e-9),
        CheckResult('mass_balance', float(np.max(mass_balance(traj))),
                    1e-10),
        CheckResult('subdifferential', float(max(
            0.0, -np.min(subdifferential_slack(traj, s.nl)))), 1e-10),
        CheckResult('difference_quotients', float(_quotient_defect(traj)),
                    1e-12),
    ]
    for name, r in interpolant_identities(traj).items():
        results.append(CheckResult('interp_' + name, float(r), 1e-12))
    rep = apriori_report(traj)
    vals = np.array([getattr(rep, k) for k in rep.TERMS + ('E_under',)])
    bad = 0.0 if np.all(np.isfinite(vals)) and np.all(vals >= 0) \
        else float('inf')
    results.append(CheckResult('apriori_finite', bad, 0.0))
    return results
