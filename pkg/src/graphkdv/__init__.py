"""Numerical workbench for stationary KdV profiles on metric star graphs.

Builds tail/bump stationary solutions with delta-type vertex coupling of
strength Z, classifies the negative spectrum of the linearized Schrödinger
operators, reconstructs the unitary group of the third-order flow from the
Airy resolvent, and locates the real unstable eigenvalue of the linearized
KdV dynamics.
"""

from .grid import (
    GraphFunction,
    GraphGrid,
    StarGraph,
    build_grid,
    inner_product,
    vertex_traces,
)
from .profiles import (
    BalancedProfile,
    Profile,
    check_vertex_conditions,
    make_balanced_profile,
    profile_function,
)

__version__ = "0.1.0"

__all__ = [
    "StarGraph",
    "GraphGrid",
    "GraphFunction",
    "build_grid",
    "inner_product",
    "vertex_traces",
    "Profile",
    "BalancedProfile",
    "make_balanced_profile",
    "check_vertex_conditions",
    "profile_function",
    "__version__",
]
