"""Finite-difference assembly of the third-order graph operators.

Builds sparse matrices for

    (M u)_e = alpha_e u''' + beta_e u' + 2 (phi_e u)'

on a balanced star graph, with the third-order vertex conditions

    u(0-) = u(0+),
    u'(0+) - u'(0-)  = Z u(0),
    u''(0+) - u''(0-) = (Z^2/2) u(0) + Z u'(0-)

folded in per edge pair by ghost-node elimination.  phi = None gives the
linear flow generator alpha d^3 + beta d.

Two vertex closures are supported.  ``closure="generator"`` uses the full
third-order conditions above (the flow-generator domain).  ``closure=
"composition"`` replaces the second-derivative jump by continuity of the
second derivative, which encodes the eigenvalue problem for the composition
N E (first-order factor applied to the second-order factor): there the
natural domain asks E u to be continuous at the vertex so that the
first-order factor stays skew-symmetric.  Both closures restrict the same
underdetermined vertex matching; growing modes of tail profiles live in the
composition domain, growing modes of bump profiles in the generator domain.

Grid layout matches the second-order module: one shared vertex unknown
(index 0) followed by the interior nodes of each edge ordered by x; the far
ends carry homogeneous Dirichlet data and zero padding beyond the cut.

Ghost values are Taylor extensions across the vertex.  The first- and
second-derivative jumps come from the vertex conditions (the second written
symmetrically through the mean slope, which makes the assembled matrix
exactly antisymmetric under the mirror map), and the third-derivative jump
is closed through the operator identity alpha*J3 + beta*J1 + 4 Z phi(0) u(0)
= 0, which holds whenever M u has no jump at the vertex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .grid import GraphFunction, GraphGrid
from .profiles import Profile

__all__ = ["Layout", "fd_weights", "third_order_matrix", "mirror_map"]


def fd_weights(offsets, der: int) -> np.ndarray:
    """Finite-difference weights on integer offsets for the der-th derivative.

    Solves the Vandermonde moment conditions; weights are in units of h**der.
    """
    import math

    offsets = np.asarray(offsets, dtype=float)
    k = len(offsets)
    V = np.vander(offsets, k, increasing=True).T
    rhs = np.zeros(k)
    rhs[der] = math.factorial(der)
    return np.linalg.solve(V, rhs)


# one-sided stencils at the vertex (offsets 0..4), order 2
_D3_ONESIDED = fd_weights(range(5), 3)     # [-5/2, 9, -12, 7, -3/2]
_D1_ONESIDED = fd_weights(range(3), 1)     # [-3/2, 2, -1/2]


@dataclass(frozen=True)
class Layout:
    """Packed-unknown bookkeeping for third-order graph matrices."""

    grid: GraphGrid

    @property
    def n_interior(self) -> int:
        return self.grid.N - 1

    @property
    def size(self) -> int:
        return 1 + self.grid.graph.edges * self.n_interior

    def offset(self, edge: int) -> int:
        return 1 + edge * self.n_interior

    def idx_plus(self, pair: int, j: int) -> int:
        """Outgoing edge of a pair, node at x = j*h (j = 1..N-1)."""
        return self.offset(self.grid.graph.m + pair) + j - 1

    def idx_minus(self, pair: int, j: int) -> int:
        """Incoming edge of a pair, node at x = -j*h (j = 1..N-1)."""
        return self.offset(pair) + (self.grid.N - j) - 1

    def weights(self) -> np.ndarray:
        """Trapezoid quadrature weights matching the packed unknowns."""
        w = np.full(self.size, self.grid.h)
        w[0] = 0.5 * self.grid.h * self.grid.graph.edges
        return w

    def to_vector(self, f: GraphFunction) -> np.ndarray:
        g = self.grid.graph
        dtype = np.result_type(*[a.dtype for a in f.values])
        v = np.zeros(self.size, dtype=dtype)
        v[0] = np.mean(f.vertex_values())
        for e in range(g.edges):
            v[self.offset(e) : self.offset(e) + self.n_interior] = f.values[e][1:-1]
        return v

    def from_vector(self, v: np.ndarray) -> GraphFunction:
        g, N = self.grid.graph, self.grid.N
        out = []
        for e in range(g.edges):
            arr = np.zeros(N + 1, dtype=v.dtype)
            arr[1:-1] = v[self.offset(e) : self.offset(e) + N - 1]
            if e < g.m:
                arr[-1] = v[0]
            else:
                arr[0] = v[0]
            out.append(arr)
        return GraphFunction(self.grid, out)

    def norm(self, v: np.ndarray) -> float:
        w = self.weights()
        return float(np.sqrt(np.real(np.conjugate(v) @ (w * v))))


def mirror_map(layout: Layout) -> np.ndarray:
    """Index permutation of the mirror symmetry x -> -x with edge-pair swap."""
    g, N = layout.grid.graph, layout.grid.N
    perm = np.zeros(layout.size, dtype=int)
    perm[0] = 0
    for pair in range(g.n):
        for j in range(1, N):
            perm[layout.idx_plus(pair, j)] = layout.idx_minus(pair, j)
            perm[layout.idx_minus(pair, j)] = layout.idx_plus(pair, j)
    return perm


def _pair_profiles(grid: GraphGrid, phi) -> list[Profile | None]:
    g = grid.graph
    if phi is None:
        return [None] * g.n
    if isinstance(phi, Profile):
        pairs = [phi] * g.n
    else:
        pairs = list(phi.profiles)
    if len(pairs) != g.n:
        raise ValueError("need one profile per edge pair")
    return pairs


def third_order_matrix(
    grid: GraphGrid, Z: float, phi=None, closure: str = "generator"
) -> sp.csr_matrix:
    """Sparse matrix of alpha u''' + beta u' + 2 (phi u)' on packed unknowns.

    ``phi`` is ``None`` (linear flow), a single :class:`Profile` (replicated
    on every pair) or a :class:`~graphkdv.profiles.BalancedProfile`.
    ``closure`` selects the vertex domain (see module docstring).
    """
    if closure not in ("generator", "composition"):
        raise ValueError("closure must be 'generator' or 'composition'")
    g = grid.graph
    if not g.balanced:
        raise ValueError("third-order vertex coupling needs a balanced graph")
    lay = Layout(grid)
    N, h = grid.N, grid.h
    pairs = _pair_profiles(grid, phi)

    rows, cols, vals = [], [], []

    def add(r, c, v):
        if v != 0.0:
            rows.append(r)
            cols.append(c)
            vals.append(v)

    for pair in range(g.n):
        a = g.alpha[g.m + pair]
        b = g.beta[g.m + pair]
        prof = pairs[pair]
        if prof is not None and (prof.alpha != a or prof.beta != b):
            raise ValueError("profile coefficients disagree with the graph")
        # phi sampled on x = j*h (mirror symmetry gives the incoming edge)
        if prof is not None:
            phi_p = prof.plus(grid.x_plus)
            phi0 = prof.vertex_value()
        else:
            phi_p = np.zeros(N + 1)
            phi0 = 0.0

        def gidx(side: str, j: int) -> int | None:
            """Global index of node at signed position j*h on this pair."""
            if j == 0:
                return 0
            if j >= N:
                return None  # Dirichlet / zero padding beyond the cut
            return lay.idx_plus(pair, j) if side == "+" else lay.idx_minus(pair, j)

        # ghost at -h seen from the outgoing edge (and mirror image):
        #   g1 = u(-h) - h J1 + (h^2/2) J2 - (h^3/6) J3
        # with J1 = Z u0, J2 = Z * mean-slope, J3 = -(Z/alpha)(beta+4 phi0) u0.
        j3c = -(Z / a) * (b + 4.0 * phi0)
        ghost_plus = {0: -h * Z - (h**3 / 6.0) * j3c}
        ghost_minus = {0: -h * Z - (h**3 / 6.0) * j3c}
        if closure == "generator":
            # second-derivative jump Z * mean-slope (absent in the
            # composition closure, where u'' is continuous)
            for sgn, side in ((1.0, "+"), (-1.0, "-")):
                for j, c in ((1, 4.0), (2, -1.0)):
                    key = (side, j)
                    coef = sgn * c / (4.0 * h)  # d_avg contribution
                    ghost_plus[key] = (
                        ghost_plus.get(key, 0.0) + (h**2 / 2.0) * Z * coef
                    )
                    ghost_minus[key] = (
                        ghost_minus.get(key, 0.0) - (h**2 / 2.0) * Z * coef
                    )
        ghost_plus[("-", 1)] = ghost_plus.get(("-", 1), 0.0) + 1.0
        ghost_minus[("+", 1)] = ghost_minus.get(("+", 1), 0.0) + 1.0

        def ghost_terms(which: str):
            table = ghost_plus if which == "+" else ghost_minus
            for key, coef in table.items():
                if key == 0:
                    yield 0, coef
                else:
                    side, j = key
                    yield gidx(side, j), coef

        # --- interior rows -------------------------------------------------
        for side, sgn in (("+", 1.0), ("-", -1.0)):
            for j in range(1, N):
                r = gidx(side, j)
                # centered u''' in x: (-f[j-2]/2 + f[j-1] - f[j+1] + f[j+2]/2)/h^3
                # where f[k] = u at signed position sgn*k*h; the signed chain
                # flips the sign of odd derivatives on the incoming edge.
                for off, c in ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)):
                    jj = j + off
                    coef = sgn * a * c / h**3
                    if jj >= 0:
                        cc = gidx(side, jj)
                        if cc is not None:
                            add(r, cc, coef)
                    else:  # jj == -1: ghost across the vertex
                        for cc, gcoef in ghost_terms(side):
                            if cc is not None:
                                add(r, cc, coef * gcoef)
                # centered first derivative terms: beta u' + 2 (phi u)'
                for off, c in ((-1, -0.5), (1, 0.5)):
                    jj = j + off
                    cc = gidx(side, jj)
                    if cc is None:
                        continue
                    pot = b + 2.0 * phi_p[abs(jj)]
                    add(r, cc, sgn * c * pot / h)

        # --- vertex row: mean of the one-sided limits over all edges --------
        scale = 1.0 / (2.0 * g.n)
        for side, sgn in (("+", 1.0), ("-", -1.0)):
            for j in range(5):
                cc = gidx(side, j)
                if cc is None:
                    continue
                coef = sgn * a * _D3_ONESIDED[j] / h**3
                if j < 3:
                    coef += sgn * (b + 2.0 * phi_p[j]) * _D1_ONESIDED[j] / h
                add(0, cc, scale * coef)

    M = sp.coo_matrix((vals, (rows, cols)), shape=(lay.size, lay.size)).tocsr()
    M.sum_duplicates()
    return M
