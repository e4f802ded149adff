#!/usr/bin/env python3
"""Grid-refinement study for the spectral solvers.

Prints observed convergence orders under h -> h/2 for
  * the two bound-state eigenvalues of the linearized Schrödinger
    operator on the two-half-line graph, and
  * the unstable growth rate of the linearized flow on both sides of the
    vertex-strength parameter, compared against the independent shooting
    values (see scripts/shooting_reference.py).

Usage: python3 scripts/convergence_study.py
"""

import sys

import numpy as np

sys.path.insert(0, "src")

from graphkdv.grid import StarGraph, build_grid
from graphkdv.linearized import growing_modes
from graphkdv.profiles import make_profile
from graphkdv.schrodinger import assemble, spectrum_below_edge

SHOOTING = {1.0: 0.1237917, 0.5: 0.0968233, -0.5: 0.2827860, -1.0: 0.3022029}


def order_triplet(vals):
    return float(np.log2(abs(vals[0] - vals[1]) / abs(vals[1] - vals[2])))


def main():
    print("Schrodinger bound states (Z=1, L=40):")
    prof = make_profile(1.0)
    seq = {0: [], 1: []}
    for N in (500, 1000, 2000):
        grid = build_grid(StarGraph.half_lines(), L=40.0, N=N)
        rep = spectrum_below_edge(assemble(grid, 1.0, prof))
        for k in (0, 1):
            seq[k].append(rep.eigenvalues[k])
        print(f"  N={N:5d}  e0={rep.eigenvalues[0]:+.8f}  e1={rep.eigenvalues[1]:+.8f}")
    for k in (0, 1):
        print(f"  eigenvalue {k}: observed order {order_triplet(seq[k]):.3f}")

    print("\nUnstable growth rate (L=30):")
    for Z in (-1.0, 1.0):
        vals = []
        for N in (300, 600, 1200):
            vals.append(growing_modes(make_profile(Z), L=30.0, N=N)["zeta"])
            print(f"  Z={Z:+.1f} N={N:5d}  zeta={vals[-1]:.8f}"
                  f"  (shooting {SHOOTING[Z]:.7f}, err {vals[-1]-SHOOTING[Z]:+.2e})")
        print(f"  Z={Z:+.1f}: observed order {order_triplet(vals):.3f}")


if __name__ == "__main__":
    main()
