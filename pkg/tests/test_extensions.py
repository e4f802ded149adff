import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphkdv.extensions import (
    boundary_matrices,
    coupling_matrix,
    deficiency_indices,
    deficiency_residual,
    theta_to_Z,
    unitarity_residual,
)
from graphkdv.grid import StarGraph, build_grid


def test_boundary_matrix_n1():
    g = StarGraph.half_lines(1.0, -1.0)
    bm, bp = boundary_matrices(g)
    expected = np.array([[1, 0, -1], [0, 1, 0], [-1, 0, 0]], dtype=float)
    np.testing.assert_array_equal(np.asarray(bm, dtype=float), expected)
    np.testing.assert_array_equal(np.asarray(bp, dtype=float), expected)


@settings(max_examples=30, deadline=None)
@given(
    st.integers(1, 3),
    st.lists(st.floats(0.2, 3.0), min_size=3, max_size=3),
    st.lists(st.floats(-3.0, -0.2), min_size=3, max_size=3),
)
def test_boundary_matrices_symmetric(n, alphas, betas):
    g = StarGraph.balanced_graph(n, alphas[:n], betas[:n])
    for b in boundary_matrices(g):
        arr = np.asarray(b, dtype=float)
        np.testing.assert_array_equal(arr, arr.T)


def test_coupling_matrix_examples():
    L = np.asarray(coupling_matrix(2.0, 1), dtype=float)
    np.testing.assert_array_equal(L, [[1, 0, 0], [2, 1, 0], [2, 2, 1]])
    np.testing.assert_array_equal(np.asarray(coupling_matrix(0.0, 2), dtype=float), np.eye(6))
    for Z, n in ((0.7, 1), (-1.3, 2), (2.5, 3)):
        assert np.linalg.det(np.asarray(coupling_matrix(Z, n), dtype=float)) == pytest.approx(1.0)


def test_unitarity_exact_rational():
    # exact rational arithmetic: residual is identically zero
    Z = Fraction(7, 10)
    g = StarGraph.half_lines(1.0, -1.0)
    bm, bp = boundary_matrices(g)
    to_exact = np.vectorize(lambda v: Fraction(v), otypes=[object])
    L = coupling_matrix(Z, 1)
    assert unitarity_residual(L, to_exact(bm), to_exact(bp)) == 0


def test_unitarity_requires_matching_alpha():
    g = StarGraph(1, 1, (1.0, 2.0), (-1.0, -1.0))
    bm, bp = boundary_matrices(g)
    L = coupling_matrix(0.7, 1)
    assert unitarity_residual(L, bm, bp) >= 1.0


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.floats(-3.0, 3.0))
def test_unitarity_equal_coefficients(n, Z):
    g = StarGraph.balanced_graph(n)
    bm, bp = boundary_matrices(g)
    L = coupling_matrix(Z, n)
    assert unitarity_residual(L, bm, bp) < 1e-13


def test_deficiency_indices():
    assert deficiency_indices(StarGraph.half_lines()) == (3, 3)
    g21 = StarGraph(2, 1, (1.0,) * 3, (-1.0,) * 3)
    assert deficiency_indices(g21) == (5, 4)
    g22 = StarGraph.balanced_graph(2)
    assert deficiency_indices(g22) == (6, 6)


def test_theta_to_Z_endpoints():
    assert theta_to_Z(0.0) == pytest.approx(0.0)
    assert math.isinf(theta_to_Z(math.pi / 2.0))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 2.0 * math.pi, exclude_max=True))
def test_theta_to_Z_real(theta):
    # skip the pole neighbourhood; elsewhere the map must produce a real Z
    if abs(theta - math.pi / 2.0) < 1e-3:
        return
    z = theta_to_Z(theta)
    assert isinstance(z, float)


def test_deficiency_elements_satisfy_algebra():
    grid = build_grid(StarGraph.half_lines(), L=20.0, N=400)
    assert deficiency_residual(grid) < 1e-12
