#!/usr/bin/env python3
"""Independent shooting computation of the unstable growth rate.

Cross-validates the dense finite-difference eigensolve in
``graphkdv.linearized.growing_modes`` without sharing any discretization
machinery: on each half-line the eigenvalue ODE

    psi''' = lam*psi + psi' - 2*(phi*psi)'        (alpha=1, beta=-1)

is integrated with an adaptive Runge-Kutta solver from the far ends toward
the vertex, seeded with the exact decaying exponentials of the constant-
coefficient limit.  A 3x3 matching determinant assembles the vertex
conditions; its real zeros in lam are the unstable rates.

The third vertex condition depends on the closure (see graphkdv.discretize):
"generator" uses the flow-domain jump, "composition" keeps psi'' continuous.

Usage: python3 scripts/shooting_reference.py [Z ...]
"""

import sys

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

sys.path.insert(0, "src")

from graphkdv.profiles import make_profile


def _rhs(prof, side):
    phi = prof.plus if side == "+" else prof.minus
    dphi = prof.plus_d1 if side == "+" else prof.minus_d1

    def f(x, y):
        psi, d1, d2 = y
        d3 = _LAM * psi + d1 - 2.0 * dphi(x) * psi - 2.0 * phi(x) * d1
        return [d1, d2, d3]

    return f


_LAM = None  # module-level because solve_ivp callbacks close over it


def _shoot(prof, lam, L=30.0, rtol=1e-10, atol=1e-12):
    """Columns of the vertex matching system at this lam."""
    global _LAM
    _LAM = lam
    mus = np.roots([1.0, 0.0, -1.0, -lam])
    # sort by imaginary part: the pair is complex-conjugate, so sorting by
    # real part is unstable and would flip the determinant's sign randomly
    decay_plus = sorted([m for m in mus if m.real < 0], key=lambda m: m.imag)
    decay_minus = [m for m in mus if m.real > 0]
    assert len(decay_plus) == 2 and len(decay_minus) == 1

    cols = []
    # minus side: one decaying direction, integrated -L -> 0
    mu = decay_minus[0]
    y0 = np.array([1.0, mu, mu**2], dtype=complex)
    sol = solve_ivp(_rhs(prof, "-"), (-L, 0.0), y0, rtol=rtol, atol=atol)
    v = sol.y[:, -1]
    cols.append(v / np.linalg.norm(v))
    # plus side: two decaying directions, integrated L -> 0
    for mu in decay_plus:
        y0 = np.array([1.0, mu, mu**2], dtype=complex)
        sol = solve_ivp(
            _rhs(prof, "+"), (L, 0.0), y0, rtol=rtol, atol=atol
        )
        v = sol.y[:, -1]
        cols.append(v / np.linalg.norm(v))
    return cols


def matching_determinant(prof, lam, Z, closure, L=30.0):
    vm, vp1, vp2 = _shoot(prof, lam, L=L)

    def col(v, side):
        psi, d1, d2 = v
        if side == "+":
            c1, c2, c3 = psi, d1, d2
        else:
            c1 = -psi
            c2 = -d1 - Z * psi  # jump condition uses u(0-) = u(0+)
            if closure == "generator":
                c3 = -d2 - 0.5 * Z**2 * psi - Z * d1
            else:
                c3 = -d2
        return np.array([c1, c2, c3], dtype=complex)

    M = np.column_stack([col(vm, "-"), col(vp1, "+"), col(vp2, "+")])
    return np.linalg.det(M)


def find_rate(Z, closure, lam_max=1.5, samples=60, L=30.0):
    # The far-field cubic mu^3 - mu = lam has all-real roots for
    # lam < sqrt(4/27), where the matching determinant is real; above that
    # a conjugate pair forms and the determinant is purely imaginary.  Use
    # the genuine component in each regime and never bracket across the
    # boundary.
    lam_star = np.sqrt(4.0 / 27.0)
    prof = make_profile(Z)

    def f(lam):
        d = matching_determinant(prof, lam, Z, closure, L=L)
        return d.real if lam < lam_star else d.imag

    lams = np.linspace(0.01, lam_max, samples)
    vals = [f(l) for l in lams]
    roots = []
    for a, b, fa, fb in zip(lams, lams[1:], vals, vals[1:]):
        if (a < lam_star) != (b < lam_star):
            continue
        if fa * fb < 0:
            roots.append(brentq(f, a, b, xtol=1e-9))
    return roots


def main(argv):
    zs = [float(a) for a in argv[1:]] or [-1.0, -0.5, 0.5, 1.0]
    print(f"{'Z':>6} {'closure':>12} {'shooting rates':>30}")
    for Z in zs:
        for closure in ("generator", "composition"):
            roots = find_rate(Z, closure)
            label = ", ".join(f"{r:.6f}" for r in roots) or "none in (0, 1.5]"
            print(f"{Z:>6.2f} {closure:>12} {label:>30}")


if __name__ == "__main__":
    main(sys.argv)
