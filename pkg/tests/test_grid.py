import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphkdv.grid import (
    GraphFunction,
    StarGraph,
    build_grid,
    embed_symmetric,
    inner_product,
    vertex_traces,
)


def test_graph_validation():
    with pytest.raises(ValueError):
        StarGraph(0, 1, (1.0,), (-1.0,))
    with pytest.raises(ValueError):
        StarGraph(1, 1, (1.0,), (-1.0, -1.0))
    with pytest.raises(ValueError):
        StarGraph(1, 1, (0.0, 1.0), (-1.0, -1.0))
    g = StarGraph.half_lines()
    assert g.balanced and g.edges == 2
    assert not StarGraph(2, 1, (1.0,) * 3, (-1.0,) * 3).balanced


def test_balanced_graph_pairs():
    g = StarGraph.balanced_graph(2, alpha=(0.5, 1.5), beta=(-1.0, -2.0))
    assert g.alpha == (0.5, 1.5, 0.5, 1.5)
    assert g.beta == (-1.0, -2.0, -1.0, -2.0)


def test_grid_geometry():
    grid = build_grid(StarGraph.half_lines(), L=10.0, N=100)
    assert grid.h == pytest.approx(0.1)
    assert grid.x_minus[0] == -10.0 and grid.x_minus[-1] == 0.0
    assert grid.x_plus[0] == 0.0 and grid.x_plus[-1] == 10.0


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_inner_product_conjugate_symmetry(seed):
    grid = build_grid(StarGraph.half_lines(), L=5.0, N=50)
    rng = np.random.default_rng(seed)
    shape = (2, grid.N + 1)
    u = GraphFunction(grid, list(rng.normal(size=shape) + 1j * rng.normal(size=shape)))
    v = GraphFunction(grid, list(rng.normal(size=shape) + 1j * rng.normal(size=shape)))
    assert inner_product(u, v) == pytest.approx(np.conjugate(inner_product(v, u)))


def test_vertex_traces_exact_on_polynomials():
    grid = build_grid(StarGraph.half_lines(), L=10.0, N=500)
    lin = GraphFunction.from_callables(grid, [lambda x: x, lambda x: x])
    tr = vertex_traces(lin)
    assert abs(tr.d1[1] - 1.0) < 1e-10
    assert abs(tr.d1[0] - 1.0) < 1e-10
    quad = GraphFunction.from_callables(grid, [lambda x: x**2, lambda x: x**2])
    tr = vertex_traces(quad)
    assert abs(tr.d2[1] - 2.0) < 1e-8
    assert abs(tr.d2[0] - 2.0) < 1e-8


def test_embed_symmetric_replicates_pairs():
    grid = build_grid(StarGraph.half_lines(), L=5.0, N=40)
    f = GraphFunction.from_callables(
        grid, [lambda x: np.exp(x), lambda x: np.exp(-x)]
    )
    big = embed_symmetric(f, 3)
    assert big.grid.graph.n == 3
    for p in range(3):
        np.testing.assert_array_equal(big.values[p], f.values[0])
        np.testing.assert_array_equal(big.values[3 + p], f.values[1])
    # total squared norm scales with the number of pairs
    assert big.norm() == pytest.approx(np.sqrt(3) * f.norm())
