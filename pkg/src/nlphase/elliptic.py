"""Neumann Helmholtz solves ``theta - h lap_h theta = rhs``.

Two routes are provided.  ``'cg'`` is diagonally preconditioned conjugate
gradients on the mirror-stencil operator.  ``'dct'`` diagonalises the same
operator with the type-II cosine transform, whose basis vectors are exactly
its eigenvectors on a uniform cell-centered grid.
"""
from dataclasses import dataclass

import numpy as np
import scipy.fft
import scipy.sparse.linalg as spla

from .grid import Grid

__all__ = ('HelmholtzProblem', 'EllipticSolveError', 'helmholtz_operator',
           'helmholtz_solve', 'solve_cg', 'solve_dct')

CG_RTOL = 1e-12


class EllipticSolveError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class HelmholtzProblem:
    grid: Grid
    h: float
    rhs: np.ndarray

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError('h must be positive, got {}'.format(self.h))
        object.__setattr__(self, 'rhs', self.grid.check(self.rhs, 'rhs'))


def helmholtz_operator(grid, h, u):
    return u - h * grid.neumann_laplacian(u)


def _diagonal(grid, h):
    diag = np.ones(grid.shape)
    for ax, (n, dx) in enumerate(zip(grid.cells, grid.spacing)):
        neighbours = np.full(n, 2.0)
        neighbours[0] = neighbours[-1] = 1.0
        bshape = [1] * grid.dim
        bshape[ax] = n
        diag = diag + h * neighbours.reshape(bshape) / dx**2
    return diag


def solve_dct(p):
    """Exact solve in the cosine eigenbasis of the mirror Laplacian."""
    grid = p.grid
    coef = scipy.fft.dctn(p.rhs, type=2, norm='ortho')
    coef /= 1.0 + p.h * grid.laplacian_eigenvalues()
    return scipy.fft.idctn(coef, type=2, norm='ortho')


def solve_cg(p, rtol=CG_RTOL, maxiter=None):
    """Jacobi-preconditioned CG; stops at ``||r|| <= rtol ||rhs||``."""
    grid, h = p.grid, p.h
    size = int(np.prod(grid.shape))
    if not np.any(p.rhs):
        return np.zeros(grid.shape)
    A = spla.LinearOperator(
        (size, size), dtype=float,
        matvec=lambda x: helmholtz_operator(
            grid, h, x.reshape(grid.shape)).ravel())
    dinv = 1.0 / _diagonal(grid, h).ravel()
    M = spla.LinearOperator((size, size), dtype=float,
                            matvec=lambda x: dinv * x.ravel())
    b = p.rhs.ravel()
    x, info = spla.cg(A, b, x0=dinv * b, rtol=rtol, atol=0.0,
                      maxiter=maxiter or 10 * size, M=M)
    if info != 0:
        raise EllipticSolveError('CG did not converge (info = {})'
                                 .format(info))
    return x.reshape(grid.shape)


def helmholtz_solve(p, method='dct'):
    """Solve ``(I - h lap_h) theta = rhs`` with homogeneous Neumann closure.

    Parameters
    ----------
    p : HelmholtzProblem
    method : {'dct', 'cg'}

    Returns
    -------
    theta : ndarray
    """
    if method == 'dct':
        return solve_dct(p)
    if method == 'cg':
        return solve_cg(p)
    raise ValueError('unknown method {!r}'.format(method))
