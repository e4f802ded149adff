"""Boundary forms and skew-self-adjoint vertex couplings.

For the third-order operator alpha d^3/dx^3 + beta d/dx on a star graph the
integration-by-parts boundary form at the vertex is encoded by the block
matrices

    B = [[-beta*I, 0, -alpha*I],
         [0,  alpha*I, 0],
         [-alpha*I, 0, 0]]

acting on the trace vector (u, u', u'').  A coupling that maps incoming
traces to outgoing traces via a matrix L yields a skew-self-adjoint
restriction exactly when L^T B_plus L = B_minus, which for the delta-type
family

    L_Z = [[I, 0, 0], [Z*I, I, 0], [(Z^2/2)*I, Z*I, I]]

holds iff the incoming and outgoing coefficients agree pairwise.  All
computations here stay exact when fed ``fractions.Fraction`` entries.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

from .grid import GraphFunction, GraphGrid, StarGraph

__all__ = [
    "boundary_matrices",
    "coupling_matrix",
    "unitarity_residual",
    "deficiency_indices",
    "theta_to_Z",
    "deficiency_elements",
    "deficiency_residual",
]


def _block(alpha, beta):
    """3k x 3k boundary-form matrix for diagonal coefficient blocks."""
    k = len(alpha)
    zero = [[0] * k for _ in range(k)]

    def diag(vals, sign=1):
        return [[sign * vals[i] if i == j else 0 for j in range(k)] for i in range(k)]

    rows = [
        [diag(beta, -1), zero, diag(alpha, -1)],
        [zero, diag(alpha), zero],
        [diag(alpha, -1), zero, zero],
    ]
    return np.block([[np.array(b, dtype=object) for b in row] for row in rows])


def boundary_matrices(graph: StarGraph):
    """(B_minus, B_plus) for the incoming and outgoing trace spaces."""
    bm = _block(list(graph.alpha[: graph.m]), list(graph.beta[: graph.m]))
    bp = _block(list(graph.alpha[graph.m :]), list(graph.beta[graph.m :]))
    return bm, bp


def coupling_matrix(Z, n: int = 1):
    """Delta-type trace coupling L_Z on a balanced graph with n pairs."""
    eye = np.eye(n, dtype=object)
    zero = np.zeros((n, n), dtype=object)
    half_sq = Z * Z * Fraction(1, 2) if isinstance(Z, Fraction) else 0.5 * Z * Z
    return np.block(
        [
            [eye, zero, zero],
            [Z * eye, eye, zero],
            [half_sq * eye, Z * eye, eye],
        ]
    )


def unitarity_residual(L, b_minus, b_plus):
    """Entrywise maximum of L^T B_plus L - B_minus (0 = skew-self-adjoint)."""
    r = L.T @ b_plus @ L - b_minus
    return max(abs(v) for v in np.asarray(r, dtype=object).ravel())


def deficiency_indices(graph: StarGraph) -> tuple[int, int]:
    """(n_plus, n_minus) = (2m + n, m + 2n) for the minimal operator."""
    return 2 * graph.m + graph.n, graph.m + 2 * graph.n


def theta_to_Z(theta: float) -> float:
    """Map the one-parameter unitary phase theta to the real strength Z.

    Z(theta) = -2 (1 - e^{i theta}) / (e^{i pi/4} - e^{i(theta - pi/4)});
    the result is real for every theta, with a pole where the denominator
    vanishes (theta = pi/2, returning +-inf).
    """
    num = -2.0 * (1.0 - cmath.exp(1j * theta))
    den = cmath.exp(1j * math.pi / 4.0) - cmath.exp(1j * (theta - math.pi / 4.0))
    if abs(den) < 1e-14:
        return math.inf if abs(num) > 1e-14 else 0.0
    z = num / den
    if abs(z.imag) > 1e-10 * max(1.0, abs(z.real)):
        raise ArithmeticError(f"theta={theta}: Z came out non-real ({z})")
    return z.real


# -- deficiency elements of the free Laplacian part ----------------------

_K_PLUS = cmath.exp(3j * math.pi / 4.0)   # k^2 = -i, Im k > 0
_K_MINUS = cmath.exp(-3j * math.pi / 4.0)  # k^2 = +i, Im k < 0


def deficiency_elements(grid: GraphGrid):
    """Explicit elements spanning Ker(F0* -+ i) for the graph Laplacian.

    Each element has components (i/k) e^{-+ i k x} on incoming edges and
    (i/k) e^{+- i k x} on outgoing edges, with k chosen so both decay.
    Requires a balanced graph only for bookkeeping symmetry.
    """
    g = grid.graph
    out = []
    for k, sgn in ((_K_PLUS, 1.0), (_K_MINUS, -1.0)):
        c = 1j / k
        vals = [c * np.exp(-sgn * 1j * k * grid.x_minus) for _ in range(g.m)]
        vals += [c * np.exp(sgn * 1j * k * grid.x_plus) for _ in range(g.n)]
        out.append(GraphFunction(grid, vals))
    return tuple(out)


def deficiency_residual(grid: GraphGrid) -> float:
    """Max pointwise residual of (-d^2/dx^2 -+ i) on the deficiency elements.

    Uses the closed forms (second derivatives of pure exponentials), so this
    checks the defining algebra k^2 = -+ i rather than a finite difference.
    """
    worst = 0.0
    # _K_PLUS: k^2 = -i so -psi'' = -i psi (Ker(F0* + i)); _K_MINUS mirrors it
    for k, sgn, sign in ((_K_PLUS, 1.0, -1.0), (_K_MINUS, -1.0, 1.0)):
        c = 1j / k
        for x, s in ((grid.x_minus, -sgn * 1j * k), (grid.x_plus, sgn * 1j * k)):
            f = c * np.exp(s * x)
            if np.max(np.abs(f)) > abs(c) * (1.0 + 1e-12):
                return math.inf  # a branch fails to decay
            res = -(s**2) * f - sign * 1j * f
            worst = max(worst, float(np.max(np.abs(res))))
    return worst
