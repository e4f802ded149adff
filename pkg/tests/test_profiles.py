import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphkdv.grid import StarGraph, build_grid, vertex_traces
from graphkdv.profiles import (
    Profile,
    check_vertex_conditions,
    make_balanced_profile,
    make_profile,
    omega_derivative,
    profile_function,
    soliton,
)


def _valid_triples():
    """(Z, omega, alpha) with omega/alpha safely above Z^2/4."""
    return (
        st.tuples(
            st.floats(-2.0, 2.0),
            st.floats(0.3, 4.0),
            st.floats(0.3, 4.0),
        )
        .filter(lambda t: t[1] / t[2] > 0.25 * t[0] ** 2 * 1.2 + 1e-3)
    )


@settings(max_examples=60, deadline=None)
@given(_valid_triples())
def test_vertex_conditions_closed_form(triple):
    Z, omega, alpha = triple
    res = check_vertex_conditions(Profile(Z=Z, omega=omega, alpha=alpha))
    assert res["continuity"] <= 1e-12
    assert res["first_jump"] <= 1e-12
    assert res["second_jump"] <= 1e-12
    assert res["mirror_slope"] <= 1e-12


@settings(max_examples=30, deadline=None)
@given(_valid_triples())
def test_mirror_symmetry_and_stationarity(triple):
    Z, omega, alpha = triple
    prof = Profile(Z=Z, omega=omega, alpha=alpha)
    x = np.linspace(0.0, 20.0, 200)
    np.testing.assert_allclose(prof.minus(-x), prof.plus(x), rtol=0, atol=1e-13)
    assert np.max(np.abs(prof.stationarity_residual(x))) < 1e-10


def test_existence_threshold():
    Profile(Z=1.9, omega=1.0, alpha=1.0)
    with pytest.raises(ValueError):
        Profile(Z=2.0, omega=1.0, alpha=1.0)
    with pytest.raises(ValueError):
        Profile(Z=-2.1, omega=1.0, alpha=1.0)


def test_kind_classification():
    assert Profile(Z=1.0).kind == "bump"
    assert Profile(Z=-1.0).kind == "tail"
    assert Profile(Z=0.0).kind == "half_soliton"


def test_half_soliton_matches_whole_line_pulse():
    prof = Profile(Z=0.0, omega=1.0, alpha=1.0)
    x = np.linspace(0.0, 15.0, 100)
    np.testing.assert_allclose(prof.plus(x), soliton(x, 1.0, -1.0), atol=1e-14)


def test_mass_against_quadrature():
    for Z in (-1.0, 0.0, 0.7):
        prof = Profile(Z=Z)
        x = np.linspace(0.0, 60.0, 400001)
        num = 2.0 * np.trapezoid(prof.plus(x) ** 2, x) if Z == 0.0 else (
            np.trapezoid(prof.plus(x) ** 2, x) + np.trapezoid(prof.minus(-x) ** 2, x)
        )
        assert prof.mass() == pytest.approx(num, rel=1e-8)


def test_mass_slope_against_finite_difference():
    for Z in (-1.0, 0.5, 1.0):
        d = 1e-5
        fd = (Profile(Z=Z, omega=1.0 + d).mass() - Profile(Z=Z, omega=1.0 - d).mass()) / (2 * d)
        assert Profile(Z=Z).mass_slope() == pytest.approx(fd, rel=1e-8)
        assert Profile(Z=Z).mass_slope() > 0  # mass monotonicity


def test_pairing_closed_form():
    # <psi, phi> = -(9/2)(1 + Z/2) at omega = alpha = 1
    for Z in (-1.0, -0.5, 0.5, 1.0):
        assert Profile(Z=Z).pairing_with_omega_derivative() == pytest.approx(
            -4.5 * (1.0 + 0.5 * Z), rel=1e-12
        )


def test_omega_derivative_matches_finite_difference():
    prof = Profile(Z=0.8)
    x = np.linspace(0.0, 20.0, 300)
    d = 1e-6
    fd = (Profile(Z=0.8, omega=1.0 + d).plus(x) - Profile(Z=0.8, omega=1.0 - d).plus(x)) / (2 * d)
    np.testing.assert_allclose(omega_derivative(prof, x), fd, atol=1e-7)


def test_balanced_validator_accepts_matched_coefficients():
    fam = make_balanced_profile(1.0, (0.5, 1.5), (-1.125, -1.375))
    assert fam.n == 2 and fam.Z == 1.0
    # shared vertex value across pairs
    vals = [p.vertex_value() for p in fam.profiles]
    assert max(vals) - min(vals) < 1e-12


def test_balanced_validator_rejects_mismatches():
    with pytest.raises(ValueError):
        make_balanced_profile(1.0, (0.5, 1.5), (-1.0, -1.0))  # combo varies
    with pytest.raises(ValueError):
        make_balanced_profile(1.0, (0.5, 1.0), (-1.125, -1.25))  # sum(alpha) != n


def test_balanced_equal_coefficients_replicate_half_line():
    fam = make_balanced_profile(1.0, (1.0, 1.0), (-1.0, -1.0))
    single = make_profile(1.0)
    x = np.linspace(0.0, 10.0, 50)
    for p in fam.profiles:
        np.testing.assert_allclose(p.plus(x), single.plus(x), atol=1e-15)


def test_half_soliton_star_kirchhoff_flux():
    # Z = 0, n = 3: continuous star with zero flux sum at the vertex
    fam = make_balanced_profile(0.0, (1.0,) * 3, (-1.0,) * 3)
    fluxes = []
    for N in (800, 1600):
        grid = build_grid(fam.graph(), L=20.0, N=N)
        f = profile_function(grid, fam)
        tr = vertex_traces(f)
        assert np.max(np.abs(tr.u - tr.u[0])) < 1e-14
        fluxes.append(sum(tr.d1[3 + p] - tr.d1[p] for p in range(3)))
    # traces use order-2 one-sided stencils, so the (analytically zero)
    # flux shows up as pure discretization error shrinking ~4x per halving
    assert abs(fluxes[0]) < 1e-4
    assert abs(fluxes[1]) < 0.3 * abs(fluxes[0])


def test_profile_function_samples_both_sides():
    prof = make_profile(-0.5)
    grid = build_grid(StarGraph.half_lines(), L=15.0, N=300)
    f = profile_function(grid, prof)
    assert f.values[0][-1] == pytest.approx(f.values[1][0])
    assert f.values[1][0] == pytest.approx(prof.vertex_value())
