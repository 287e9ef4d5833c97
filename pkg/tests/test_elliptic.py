import numpy as np
import pytest

from nlphase.elliptic import (HelmholtzProblem, helmholtz_operator,
                              helmholtz_solve)
from nlphase.grid import Grid

GRIDS = [Grid((1.0,), (64,)), Grid((1.0, 2.0), (16, 24))]


def dense_matrix(grid, h):
    """Assemble I - h lap_h column by column from unit vectors."""
    n = int(np.prod(grid.shape))
    A = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        A[:, j] = helmholtz_operator(grid, h, e.reshape(grid.shape)).ravel()
    return A


@pytest.mark.parametrize('method', ['dct', 'cg'])
@pytest.mark.parametrize('grid', GRIDS)
def test_trivial_rhs(method, grid):
    c = helmholtz_solve(HelmholtzProblem(grid, 0.1, grid.constant(1.7)),
                        method)
    np.testing.assert_allclose(c, 1.7, rtol=1e-12)
    z = helmholtz_solve(HelmholtzProblem(grid, 0.1, grid.zeros()), method)
    assert np.all(z == 0.0)


@pytest.mark.parametrize('method', ['dct', 'cg'])
def test_cosine_mode_against_eigen_oracle(method):
    g = GRIDS[0]
    x = g.coords()[0]
    rhs = np.cos(np.pi * x)
    lam = (2 * 64 * np.sin(np.pi / 128))**2
    theta = helmholtz_solve(HelmholtzProblem(g, 0.1, rhs), method)
    np.testing.assert_allclose(theta, rhs / (1 + 0.1 * lam), atol=1e-10)


@pytest.mark.parametrize('grid', GRIDS)
def test_dct_matches_dense_solve(grid, rng):
    rhs = rng.normal(size=grid.shape)
    A = dense_matrix(grid, 0.03)
    oracle = np.linalg.solve(A, rhs.ravel()).reshape(grid.shape)
    got = helmholtz_solve(HelmholtzProblem(grid, 0.03, rhs), 'dct')
    np.testing.assert_allclose(got, oracle, atol=1e-11)


@pytest.mark.parametrize('method', ['dct', 'cg'])
@pytest.mark.parametrize('grid', GRIDS)
def test_residual_mean_and_maximum_principle(method, grid, rng):
    for h in (1e-3, 0.1, 2.0):
        rhs = rng.uniform(-3, 5, size=grid.shape)
        p = HelmholtzProblem(grid, h, rhs)
        theta = helmholtz_solve(p, method)
        res = helmholtz_operator(grid, h, theta) - rhs
        assert grid.l2_norm(res) <= 1e-10 * grid.l2_norm(rhs)
        one = grid.constant(1.0)
        assert grid.l2_inner(theta, one) == pytest.approx(
            grid.l2_inner(rhs, one), rel=1e-10)
        assert np.all(theta >= rhs.min() - 1e-10)
        assert np.all(theta <= rhs.max() + 1e-10)


@pytest.mark.parametrize('grid', GRIDS)
def test_small_h_limit(grid, rng):
    X = grid.mesh()
    rhs = np.cos(np.pi * X[0]) + 0.3 * np.cos(2 * np.pi * X[-1] / 2.0)
    for h in (1e-2, 1e-4, 1e-6):
        theta = helmholtz_solve(HelmholtzProblem(grid, h, rhs))
        bound = h * grid.l2_norm(grid.neumann_laplacian(rhs))
        assert grid.l2_norm(theta - rhs) <= bound * (1 + 1e-6)


def test_problem_validation():
    g = GRIDS[0]
    with pytest.raises(ValueError):
        HelmholtzProblem(g, 0.0, g.zeros())
    with pytest.raises(ValueError):
        HelmholtzProblem(g, 0.1, np.zeros(3))
    with pytest.raises(ValueError):
        helmholtz_solve(HelmholtzProblem(g, 0.1, g.zeros()), 'lu')
