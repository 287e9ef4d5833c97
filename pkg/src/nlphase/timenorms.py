"""Exact space-time norms of piecewise-polynomial-in-time node data.

All routines take node arrays with time along axis 0.  Right/left constant
functions integrate as ``h * sum``; piecewise-linear ones through the closed
form of ``int_0^1 |a + s (b - a)|^2 ds``.  Nothing here samples in time.
"""
import numpy as np

__all__ = ('linear_sq_integral', 'linear_sup', 'linf_linear_sq_integral',
           'upper_envelope_breaks')


def linear_sq_integral(na2, nb2, ab):
    """``int_0^1 |a + s (b - a)|^2 ds`` from ``|a|^2``, ``|b|^2``, ``(a, b)``."""
    return (na2 + ab + nb2) / 3.0


def linear_sup(na2, nb2, ab):
    """``max_{s in [0,1]} |a + s (b - a)|`` for a Hilbert norm.

    The squared norm is the quadratic ``q(s) = A s^2 + B s + C`` with
    ``A = |b - a|^2 >= 0``; its maximum on ``[0, 1]`` is taken at an endpoint
    or, if ``A < 0`` (impossible up to rounding), at the stationary point.
    """
    na2, nb2, ab = (np.asarray(x, dtype=float) for x in (na2, nb2, ab))
    A = na2 + nb2 - 2 * ab
    B = 2 * (ab - na2)
    best = np.maximum(na2, nb2)
    with np.errstate(divide='ignore', invalid='ignore'):
        s = np.where(A < 0, -B / (2 * A), 0.0)
    inside = (A < 0) & (s > 0) & (s < 1)
    q = A * s * s + B * s + na2
    best = np.where(inside, np.maximum(best, q), best)
    return np.sqrt(np.maximum(best, 0.0))


def upper_envelope_breaks(slopes, intercepts):
    """Breakpoints in ``(0, 1)`` of ``s -> max_i (intercepts_i + slopes_i s)``.

    Convex-hull sweep over the lines sorted by slope.
    """
    order = np.lexsort((intercepts, slopes))
    m, c = slopes[order], intercepts[order]
    # keep the largest intercept for each slope
    keep = np.append(m[1:] != m[:-1], True)
    m, c = m[keep], c[keep]
    hull = []
    for mi, ci in zip(m, c):
        while len(hull) >= 2:
            (m1, c1), (m2, c2) = hull[-2], hull[-1]
            # drop line 2 if line i overtakes line 1 before line 2 does
            if (ci - c1) * (m2 - m1) >= (c2 - c1) * (mi - m1):
                hull.pop()
            else:
                break
        hull.append((mi, ci))
    breaks = [(c1 - c2) / (m2 - m1)
              for (m1, c1), (m2, c2) in zip(hull[:-1], hull[1:])]
    return np.array(sorted(x for x in breaks if 0.0 < x < 1.0))


def linf_linear_sq_integral(a, b):
    """``int_0^1 max_x |a(x) + s (b(x) - a(x))|^2 ds`` exactly.

    The integrand is the square of a convex piecewise-linear function of
    ``s``; its kinks come from the upper envelope of the lines ``+-(a + s d)``.
    """
    a = np.ravel(a)
    d = np.ravel(b) - a
    slopes = np.concatenate([d, -d])
    intercepts = np.concatenate([a, -a])
    pts = np.concatenate([[0.0], upper_envelope_breaks(slopes, intercepts),
                          [1.0]])
    vals = np.max(np.abs(a[None, :] + pts[:, None] * d[None, :]), axis=1)
    y0, y1, L = vals[:-1], vals[1:], np.diff(pts)
    return float(np.sum(L * (y0 * y0 + y0 * y1 + y1 * y1) / 3.0))
