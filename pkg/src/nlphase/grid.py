"""Uniform cell-centered grids and the discrete H, V and Neumann operators.

Fields are plain ``numpy`` arrays of shape ``grid.shape``.  Quadrature is the
midpoint rule, so the total weight of the grid equals the measure of the box
exactly, and the mirror-closed Laplacian telescopes to zero mean.
"""
from dataclasses import dataclass

import numpy as np

__all__ = ('Grid', 'GridMismatchError', 'NonFiniteFieldError')


class GridMismatchError(ValueError):
    """Raised when a field does not live on the grid it is used with."""


class NonFiniteFieldError(FloatingPointError):
    """Raised when a field contains NaN or Inf."""


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid on the box ``[0, L_1] x ... x [0, L_d]``.

    Parameters
    ----------
    lengths : tuple of float
        Box side lengths, one per axis (``d = len(lengths)`` is 1 or 2).
    cells : tuple of int
        Number of cells per axis, at least 2 each.
    """

    lengths: tuple
    cells: tuple

    def __post_init__(self):
        lengths = tuple(float(x) for x in np.atleast_1d(self.lengths))
        cells = tuple(int(n) for n in np.atleast_1d(self.cells))
        if len(lengths) not in (1, 2):
            raise ValueError('only d = 1 or d = 2 is supported, got d = {}'
                             .format(len(lengths)))
        if len(cells) != len(lengths):
            raise ValueError('lengths and cells must have the same length')
        if any(n < 2 for n in cells):
            raise ValueError('need at least 2 cells per axis, got {}'
                             .format(cells))
        if not all(np.isfinite(x) and x > 0 for x in lengths):
            raise ValueError('box lengths must be finite and positive')
        object.__setattr__(self, 'lengths', lengths)
        object.__setattr__(self, 'cells', cells)

    @property
    def dim(self):
        return len(self.cells)

    @property
    def shape(self):
        return self.cells

    @property
    def spacing(self):
        return tuple(L / n for L, n in zip(self.lengths, self.cells))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @property
    def volume(self):
        return float(np.prod(self.lengths))

    @property
    def center(self):
        return tuple(0.5 * L for L in self.lengths)

    def coords(self):
        """Cell-center coordinates, one 1-D array per axis."""
        return tuple((np.arange(n) + 0.5) * dx
                     for n, dx in zip(self.cells, self.spacing))

    def mesh(self):
        """Cell-center coordinates broadcast to ``self.shape`` (ij indexing)."""
        return np.meshgrid(*self.coords(), indexing='ij')

    def zeros(self):
        return np.zeros(self.shape)

    def constant(self, value):
        return np.full(self.shape, float(value))

    def check(self, u, name='field'):
        """Return ``u`` as a float array, verifying shape and finiteness."""
        u = np.asarray(u, dtype=float)
        if u.shape != self.shape:
            raise GridMismatchError('{} has shape {}, grid expects {}'
                                    .format(name, u.shape, self.shape))
        if not np.all(np.isfinite(u)):
            raise NonFiniteFieldError('{} contains non-finite values'
                                      .format(name))
        return u

    # -- integrals and norms ------------------------------------------------

    def integrate(self, u):
        return self.cell_volume * float(np.sum(u))

    def l2_inner(self, u, w):
        """Discrete ``(u, w)_H``: midpoint rule for the integral of ``u w``."""
        u = self.check(u, 'u')
        w = self.check(w, 'w')
        return self.cell_volume * float(np.sum(u * w))

    def l2_norm(self, u):
        return np.sqrt(self.l2_inner(u, u))

    def face_gradients(self, u):
        """Forward differences on interior faces, one array per axis.

        Boundary faces carry zero flux and are omitted.
        """
        u = self.check(u, 'u')
        return [np.diff(u, axis=ax) / dx
                for ax, dx in enumerate(self.spacing)]

    def grad_norm_sq(self, u):
        """``||grad_h u||_H^2`` with the face-based discrete gradient."""
        return self.cell_volume * float(
            sum(np.sum(g * g) for g in self.face_gradients(u)))

    def v_norm_sq(self, u):
        """Squared discrete ``V = H^1`` norm."""
        return self.grad_norm_sq(u) + self.l2_inner(u, u)

    def v_norm(self, u):
        return np.sqrt(self.v_norm_sq(u))

    @staticmethod
    def linf_norm(u):
        u = np.asarray(u, dtype=float)
        return float(np.max(np.abs(u))) if u.size else 0.0

    # -- operators ----------------------------------------------------------

    def neumann_laplacian(self, u):
        """Centered 5-point (3-point in 1-D) Laplacian with mirror ghosts.

        The ghost value outside each boundary face copies the adjacent cell,
        so the normal flux through the boundary is zero and the sum of the
        result over all cells vanishes identically.
        """
        u = self.check(u, 'u')
        out = np.zeros_like(u)
        for ax, dx in enumerate(self.spacing):
            flux = np.diff(u, axis=ax) / dx**2
            lo = [slice(None)] * u.ndim
            hi = [slice(None)] * u.ndim
            lo[ax] = slice(0, -1)
            hi[ax] = slice(1, None)
            out[tuple(lo)] += flux
            out[tuple(hi)] -= flux
        return out

    def laplacian_eigenvalues(self):
        """Eigenvalues of ``-neumann_laplacian`` in the DCT-II basis."""
        lam = np.zeros(self.shape)
        for ax, (n, dx) in enumerate(zip(self.cells, self.spacing)):
            k = np.arange(n)
            lam1 = (2.0 / dx * np.sin(np.pi * k / (2 * n)))**2
            bshape = [1] * self.dim
            bshape[ax] = n
            lam = lam + lam1.reshape(bshape)
        return lam
