"""Pointwise resolvent of the phi update.

Each step of the scheme reduces, cell by cell, to the scalar equation

    F(r) = (1 + h) r + h^2 beta(r) + h^2 pi(r) - g = 0,

with ``beta`` nondecreasing and ``pi`` Lipschitz.  For ``h < min(1, 1/|pi'|)``
``F`` is strictly increasing and unbounded in both directions, so the root is
unique and can be bracketed.
"""
from dataclasses import dataclass

import numpy as np

__all__ = ('Nonlinearity', 'StepAdmissibility', 'InadmissibleStepError',
           'ResolventError', 'admissible_h', 'check_step', 'residual',
           'resolvent', 'resolvent_solve', 'resolvent_field',
           'resolvent_bisect')

RESIDUAL_RTOL = 1e-12
MAX_ITER = 100


class InadmissibleStepError(ValueError):
    """Step size outside ``(0, min{1, 1/|pi'|})``."""


class ResolventError(ArithmeticError):
    """The scalar solve failed to bracket or converge."""


@dataclass(frozen=True)
class Nonlinearity:
    """Monotone part ``beta`` and Lipschitz perturbation ``pi``.

    ``beta(r) = sum_p c_p r^p`` over odd powers ``p`` with ``c_p >= 0``,
    ``betahat`` is its primitive vanishing at zero and ``pi(r) = b r + c``.

    Parameters
    ----------
    beta : tuple of (int, float)
        ``(power, coefficient)`` pairs.  The canonical choice is
        ``((3, a),)``.
    pi_b, pi_c : float
        Slope and offset of ``pi``.
    check_radius : float
        Half-width of the sample interval used by :meth:`validate`.
    """

    beta: tuple = ((3, 1.0),)
    pi_b: float = 0.0
    pi_c: float = 0.0
    check_radius: float = 10.0

    def __post_init__(self):
        terms = tuple(sorted((int(p), float(c)) for p, c in dict(
            self.beta).items()))
        object.__setattr__(self, 'beta', terms)
        object.__setattr__(self, 'pi_b', float(self.pi_b))
        object.__setattr__(self, 'pi_c', float(self.pi_c))
        self.validate()

    @classmethod
    def cubic(cls, a=1.0, b=0.0, c=0.0):
        """``beta(r) = a r^3``, ``pi(r) = b r + c``."""
        return cls(beta=((3, a),), pi_b=b, pi_c=c)

    @property
    def lipschitz_pi(self):
        return abs(self.pi_b)

    def validate(self):
        for p, c in self.beta:
            if p < 1 or p % 2 == 0:
                raise ValueError('beta power {} is not a positive odd integer;'
                                 ' only odd monotone terms are admitted'
                                 .format(p))
            if not np.isfinite(c) or c < 0:
                raise ValueError('beta coefficient of r^{} must be finite and'
                                 ' nonnegative, got {}'.format(p, c))
        if not (np.isfinite(self.pi_b) and np.isfinite(self.pi_c)):
            raise ValueError('pi coefficients must be finite')
        r = np.linspace(-self.check_radius, self.check_radius, 1000)
        b = self.beta_fn(r)
        if abs(self.beta_fn(0.0)) != 0.0 or np.any(np.diff(b) < 0):
            raise ValueError('beta must vanish at 0 and be nondecreasing')
        bh = self.betahat(r)
        if np.any(bh < 0) or self.betahat(0.0) != 0.0:
            raise ValueError('betahat must be nonnegative with betahat(0) = 0')
        eps = 1e-5 * np.maximum(1.0, np.abs(r))
        fd = (self.betahat(r + eps) - self.betahat(r - eps)) / (2 * eps)
        if np.any(np.abs(fd - b) > 1e-6 * np.maximum(1.0, np.abs(b))):
            raise ValueError("betahat' does not match beta")

    def beta_fn(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for p, c in self.beta:
            out = out + c * r**p
        return out

    def beta_prime(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for p, c in self.beta:
            out = out + c * p * r**(p - 1)
        return out

    def betahat(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for p, c in self.beta:
            out = out + c * r**(p + 1) / (p + 1)
        return out

    def pi_fn(self, r):
        return self.pi_b * np.asarray(r, dtype=float) + self.pi_c


@dataclass(frozen=True)
class StepAdmissibility:
    """Upper bound on the time step; accepted steps satisfy ``h < h_max``."""

    h_max: float

    def admits(self, h):
        return 0.0 < h < self.h_max


def admissible_h(nl):
    """``h_max = min{1, 1/|pi'|}`` (``1`` when ``pi`` is constant)."""
    if nl.lipschitz_pi == 0:
        return StepAdmissibility(1.0)
    return StepAdmissibility(min(1.0, 1.0 / nl.lipschitz_pi))


def check_step(h, nl):
    adm = admissible_h(nl)
    if not adm.admits(h):
        raise InadmissibleStepError(
            'time step h = {:g} is not admissible: need 0 < h < '
            "min{{1, 1/|pi'|}} = {:g}".format(h, adm.h_max))
    return adm


def residual(r, g, h, nl):
    """``F(r) = (1 + h) r + h^2 beta(r) + h^2 pi(r) - g``."""
    return (1.0 + h) * r + h * h * (nl.beta_fn(r) + nl.pi_fn(r)) - g


def _bracket(g, h, nl):
    radius = 1.0 + np.abs(g)
    for _ in range(200):
        flo = residual(-radius, g, h, nl)
        fhi = residual(radius, g, h, nl)
        if not (np.all(np.isfinite(flo)) and np.all(np.isfinite(fhi))):
            raise ResolventError('nonlinearity is not finite while bracketing'
                                 ' the root')
        bad = (flo > 0) | (fhi < 0)
        if not np.any(bad):
            return -radius, radius
        radius = np.where(bad, 2.0 * radius, radius)
    raise ResolventError('bracket expansion failed')


def resolvent(g, h, nl, tol=RESIDUAL_RTOL, max_iter=MAX_ITER):
    """Solve ``F(r) = 0`` elementwise by bracketed Newton.

    Newton iterates that leave the current bracket are replaced by the
    bracket midpoint, so every cell converges.  Iteration continues past the
    residual tolerance until the Newton correction is at rounding level.

    Returns
    -------
    r : ndarray
        Root with ``|F(r)| <= tol (1 + |g|)`` in every cell.
    """
    check_step(h, nl)
    g = np.asarray(g, dtype=float)
    if not np.all(np.isfinite(g)):
        raise ResolventError('right-hand side is not finite')
    shape = g.shape
    g = g.ravel().copy()
    lo, hi = _bracket(g, h, nl)
    lo = np.broadcast_to(lo, g.shape).copy()
    hi = np.broadcast_to(hi, g.shape).copy()
    x = np.clip(g / (1.0 + h), lo, hi)
    bound = tol * (1.0 + np.abs(g))
    active = np.ones(g.shape, dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xi, gi = x[idx], g[idx]
        f = residual(xi, gi, h, nl)
        lo[idx] = np.where(f < 0, xi, lo[idx])
        hi[idx] = np.where(f > 0, xi, hi[idx])
        df = (1.0 + h) + h * h * (nl.beta_prime(xi) + nl.pi_b)
        step = f / df
        xn = xi - step
        outside = ~((xn > lo[idx]) & (xn < hi[idx]))
        xn = np.where(outside, 0.5 * (lo[idx] + hi[idx]), xn)
        tiny = 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(xi))
        done = (f == 0) | ((np.abs(f) <= bound[idx])
                           & (np.abs(step) <= tiny)) \
            | (hi[idx] - lo[idx] <= tiny)
        x[idx] = np.where(f == 0, xi, np.where(done, xi, xn))
        active[idx[done]] = False
    f = residual(x, g, h, nl)
    if np.any(np.abs(f) > bound):
        worst = int(np.argmax(np.abs(f) / bound))
        raise ResolventError(
            'resolvent did not converge in {} iterations (g = {:g}, |F| = '
            '{:.3e})'.format(max_iter, g[worst], abs(f[worst])))
    return x.reshape(shape)


def resolvent_solve(g, h, nl):
    """Scalar root of ``F``; see :func:`resolvent`."""
    return float(resolvent(np.array([float(g)]), h, nl)[0])


def resolvent_field(g, h, nl):
    """Cellwise resolvent of a field ``g``."""
    return resolvent(g, h, nl)


def resolvent_bisect(g, h, nl, max_iter=400):
    """Plain bisection on the same bracket, run to rounding level.

    Slow but unconditionally convergent; used as a cross-check for
    :func:`resolvent`.
    """
    check_step(h, nl)
    g = np.asarray(g, dtype=float)
    lo, hi = _bracket(g, h, nl)
    lo = np.broadcast_to(lo, g.shape).astype(float)
    hi = np.broadcast_to(hi, g.shape).astype(float)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if np.all((mid == lo) | (mid == hi)):
            break
        f = residual(mid, g, h, nl)
        lo = np.where(f <= 0, mid, lo)
        hi = np.where(f >= 0, mid, hi)
    flo = np.abs(residual(lo, g, h, nl))
    fhi = np.abs(residual(hi, g, h, nl))
    return np.where(flo <= fhi, lo, hi)
