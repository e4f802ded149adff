import numpy as np
import pytest

from graphkdv.airy_group import (
    ContourSpec,
    _edge_derivative,
    bromwich_apply,
    domain_invariance_check,
    pair_condition_residuals,
    reflect,
    skew_projected_generator,
    timestep_apply,
)
from graphkdv.discretize import Layout
from graphkdv.grid import GraphFunction, StarGraph, build_grid


def _half_grid(L=30.0, N=800):
    return build_grid(StarGraph.half_lines(1.0, -1.0), L=L, N=N)


def _bumps(grid, center=8.0, width2=9.0):
    def f(x):
        return np.exp(-((np.abs(x) - center) ** 2) / width2)

    return GraphFunction.from_callables(grid, [f, f])


def test_reflect_is_an_involution_and_swaps_edges():
    grid = _half_grid(N=60)
    f = GraphFunction.from_callables(grid, [lambda x: x**2, lambda x: x**3])
    g = reflect(f)
    np.testing.assert_allclose(g.values[0], (-grid.x_minus) ** 3)
    np.testing.assert_allclose(g.values[1], (-grid.x_plus) ** 2)
    h = reflect(g)
    for a, b in zip(h.values, f.values):
        np.testing.assert_array_equal(a, b)


def test_edge_derivative_exact_on_polynomials():
    x = np.linspace(0.0, 3.0, 61)
    h = x[1] - x[0]
    np.testing.assert_allclose(_edge_derivative(x**4, h, 1, 7), 4 * x**3, atol=1e-9)
    np.testing.assert_allclose(_edge_derivative(x**4, h, 3, 9), 24 * x, atol=1e-6)


def test_skew_projection_is_skew_in_weighted_metric():
    grid = _half_grid(N=200)
    A = skew_projected_generator(grid, 1.0).toarray()
    w = Layout(grid).weights()
    sym = A + (A.T * w[:, None]) / w[None, :]
    assert np.max(np.abs(sym)) < 1e-10


def test_timestepper_conserves_norm():
    grid = _half_grid()
    w = _bumps(grid)
    _, norms = timestep_apply(w, 0.2, 1.0, dt=1e-3, return_norms=True)
    assert np.max(np.abs(norms - norms[0])) / norms[0] < 1e-11


def test_bromwich_matches_timestepper():
    grid = _half_grid(L=30.0, N=1000)
    w = _bumps(grid)
    t = 0.3
    us = timestep_apply(w, t, 1.0, dt=5e-4)
    ub = bromwich_apply(w, t, 1.0, ContourSpec(T_im=300.0, M=4000, cluster=4.0))
    assert (ub - us).norm() / us.norm() < 2e-3


def test_bromwich_norm_preservation_and_continuity():
    grid = _half_grid(L=30.0, N=1000)
    w = _bumps(grid)
    contour = ContourSpec(T_im=300.0, M=4000, cluster=4.0)
    ub = bromwich_apply(w, 0.5, 1.0, contour)
    assert abs(ub.norm() - w.norm()) / w.norm() < 1e-4

    # strong continuity: W(t)w = w + t*Aw + o(t)
    t = 0.01
    u_small = bromwich_apply(w, t, 1.0, contour)
    from graphkdv.airy_group import _free_generator

    aw = _free_generator(w)
    assert (u_small - w - t * aw).norm() / w.norm() < 1e-3
    # and the raw difference decays linearly in t
    u_half = bromwich_apply(w, t / 2, 1.0, contour)
    ratio = (u_small - w).norm() / (u_half - w).norm()
    assert ratio == pytest.approx(2.0, rel=0.05)


def test_bromwich_rejects_unbalanced_or_negative_time():
    grid = _half_grid(N=60)
    w = _bumps(grid)
    with pytest.raises(ValueError):
        bromwich_apply(w, -0.1, 1.0)


def test_domain_invariance_small():
    out = domain_invariance_check(
        1.0, n=2, t=0.3, samples=2, L=30.0, N=1000,
        contour=ContourSpec(T_im=300.0, M=4000, cluster=4.0),
    )
    assert out["continuity_spread"] < 1e-6
    assert out["condition_residual"] < 1e-6
    assert out["stepper_agreement"] < 1e-3


def test_domain_invariance_rejects_non_replicated_data():
    graph = StarGraph.balanced_graph(2)
    grid = build_grid(graph, L=10.0, N=50)
    rng = np.random.default_rng(0)
    u0 = GraphFunction(grid, list(rng.normal(size=(4, grid.N + 1))))
    with pytest.raises(ValueError):
        domain_invariance_check(1.0, n=2, L=10.0, N=50, u0=u0)


def test_pair_condition_residuals_on_exact_profile():
    from graphkdv.profiles import make_profile, profile_function

    prof = make_profile(1.0)
    grid = _half_grid(L=30.0, N=1500)
    f = profile_function(grid, prof)
    cont, r1, r2 = pair_condition_residuals(f, 1.0, 0)
    assert cont < 1e-12 and r1 < 1e-8 and r2 < 1e-6
