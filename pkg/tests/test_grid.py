import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from nlphase.grid import Grid, GridMismatchError, NonFiniteFieldError

G1 = Grid((1.0,), (64,))
G2 = Grid((1.0, 2.0), (8, 12))


def test_grid_weights_sum_to_volume():
    for g in (G1, G2, Grid((0.3, 1.7), (7, 5))):
        assert g.cell_volume * np.prod(g.cells) == pytest.approx(
            g.volume, rel=1e-15)
        assert all(dx > 0 for dx in g.spacing)


@pytest.mark.parametrize('kw', [dict(lengths=(1.0,), cells=(1,)),
                                dict(lengths=(1.0, 1, 1), cells=(2, 2, 2)),
                                dict(lengths=(0.0,), cells=(4,)),
                                dict(lengths=(1.0,), cells=(4, 4))])
def test_grid_rejects_bad_shapes(kw):
    with pytest.raises(ValueError):
        Grid(**kw)


def test_l2_inner_examples():
    one = G1.constant(1.0)
    assert G1.l2_inner(one, one) == pytest.approx(1.0, rel=1e-15)
    assert G1.l2_inner(one, G1.zeros()) == 0.0
    x = G1.coords()[0]
    oracle = 0.0
    for xi in x:
        oracle += xi * xi * (1.0 / 64)
    assert G1.l2_inner(x, x) == pytest.approx(oracle, rel=1e-14)
    assert oracle == pytest.approx(1 / 3, abs=1e-4)


def test_mismatch_and_nonfinite():
    with pytest.raises(GridMismatchError):
        G1.l2_inner(np.ones(63), np.ones(64))
    bad = np.ones(64)
    bad[3] = np.nan
    with pytest.raises(NonFiniteFieldError):
        G1.l2_inner(bad, bad)


def test_v_norm_examples():
    assert G1.v_norm_sq(G1.constant(3.0)) == pytest.approx(9.0, rel=1e-14)
    assert G1.v_norm_sq(G1.zeros()) == 0.0
    g = Grid((1.0,), (256,))
    u = np.cos(np.pi * g.coords()[0])
    assert abs(g.v_norm_sq(u) - (0.5 + np.pi**2 * 0.5)) < 1e-3


def test_linf_norm():
    assert Grid.linf_norm(np.full(4, 3.0)) == 3.0
    assert Grid.linf_norm(np.zeros(4)) == 0.0
    assert Grid.linf_norm(np.array([-5.0, 2.0])) == 5.0


def test_laplacian_examples():
    assert np.all(G1.neumann_laplacian(G1.constant(2.5)) == 0.0)
    x = G1.coords()[0]
    lap = G1.neumann_laplacian(x**2)
    # interior stencil is exact on quadratics
    np.testing.assert_allclose(lap[1:-1], 2.0, rtol=1e-9)


def test_laplacian_matches_dense_ghost_stencil(rng):
    u = rng.normal(size=G2.shape)
    padded = np.pad(u, 1, mode='edge')
    dx, dy = G2.spacing
    oracle = ((padded[2:, 1:-1] - 2 * u + padded[:-2, 1:-1]) / dx**2
              + (padded[1:-1, 2:] - 2 * u + padded[1:-1, :-2]) / dy**2)
    np.testing.assert_allclose(G2.neumann_laplacian(u), oracle, rtol=1e-12,
                               atol=1e-10)


def test_laplacian_eigenvalues_match_cosine_modes():
    g = Grid((1.0, 2.0), (6, 5))
    lam = g.laplacian_eigenvalues()
    X, Y = g.mesh()
    for k1, k2 in [(0, 0), (1, 0), (2, 3), (5, 4)]:
        mode = np.cos(k1 * np.pi * X / 1.0) * np.cos(k2 * np.pi * Y / 2.0)
        np.testing.assert_allclose(-g.neumann_laplacian(mode),
                                   lam[k1, k2] * mode, atol=1e-9)


fields1 = arrays(np.float64, (64,),
                 elements=st.floats(-1e3, 1e3, allow_nan=False))
fields2 = arrays(np.float64, (8, 12),
                 elements=st.floats(-1e3, 1e3, allow_nan=False))


@settings(max_examples=60, deadline=None)
@given(u=fields1, w=fields1)
def test_inner_properties_1d(u, w):
    assert G1.l2_inner(u, w) == G1.l2_inner(w, u)
    if np.max(np.abs(u)) > 1e-150:
        assert G1.l2_inner(u, u) > 0
    assert G1.v_norm_sq(u) >= G1.l2_inner(u, u)


@settings(max_examples=60, deadline=None)
@given(u=st.one_of(fields1, fields2))
def test_laplacian_has_zero_mean(u):
    g = G1 if u.ndim == 1 else G2
    scale = np.sqrt(g.l2_inner(u, u)) * max(1 / dx**2 for dx in g.spacing)
    assert abs(g.l2_inner(g.neumann_laplacian(u), g.constant(1.0))) <= \
        1e-12 * max(scale, 1.0)


@settings(max_examples=60, deadline=None)
@given(u=fields2, w=fields2)
def test_laplacian_self_adjoint_and_summation_by_parts(u, w):
    g = G2
    lhs = g.l2_inner(g.neumann_laplacian(u), w)
    rhs = g.l2_inner(u, g.neumann_laplacian(w))
    scale = (np.sqrt(g.l2_inner(u, u) * g.l2_inner(w, w))
             * max(1 / dx**2 for dx in g.spacing))
    assert abs(lhs - rhs) <= 1e-10 * max(scale, 1.0)
    sbp = -g.l2_inner(g.neumann_laplacian(u), u) + g.l2_inner(u, u)
    assert g.v_norm_sq(u) == pytest.approx(sbp, rel=1e-10, abs=1e-9)
