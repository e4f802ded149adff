"""Metric star graphs and uniform grids on them.

A star graph here is a vertex at the origin with ``m`` half-lines running in
from -infinity and ``n`` half-lines running out to +infinity.  Each edge
carries its own dispersion/drift coefficients (alpha_e, beta_e).  Functions on
the graph are stored edge by edge on uniform grids truncated at +-L, with the
vertex value included on every edge so that one-sided traces can be formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "StarGraph",
    "GraphGrid",
    "GraphFunction",
    "TraceSet",
    "build_grid",
    "inner_product",
    "vertex_traces",
    "embed_symmetric",
]


@dataclass(frozen=True)
class StarGraph:
    """Star graph with ``m`` incoming and ``n`` outgoing half-lines.

    ``alpha`` and ``beta`` hold the per-edge coefficients, incoming edges
    first, then outgoing edges (length m + n).
    """

    m: int
    n: int
    alpha: tuple[float, ...]
    beta: tuple[float, ...]

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("need at least one edge on each side")
        if len(self.alpha) != self.m + self.n or len(self.beta) != self.m + self.n:
            raise ValueError("coefficient tuples must have length m + n")
        if any(a <= 0 for a in self.alpha):
            raise ValueError("alpha coefficients must be positive")

    @property
    def balanced(self) -> bool:
        return self.m == self.n

    @property
    def edges(self) -> int:
        return self.m + self.n

    def alpha_minus(self) -> np.ndarray:
        return np.asarray(self.alpha[: self.m], dtype=float)

    def alpha_plus(self) -> np.ndarray:
        return np.asarray(self.alpha[self.m :], dtype=float)

    def beta_minus(self) -> np.ndarray:
        return np.asarray(self.beta[: self.m], dtype=float)

    def beta_plus(self) -> np.ndarray:
        return np.asarray(self.beta[self.m :], dtype=float)

    @classmethod
    def half_lines(cls, alpha: float = 1.0, beta: float = -1.0) -> "StarGraph":
        """The two-half-line graph (m = n = 1) with equal coefficients."""
        return cls(1, 1, (alpha, alpha), (beta, beta))

    @classmethod
    def balanced_graph(
        cls, n: int, alpha=None, beta=None
    ) -> "StarGraph":
        """Balanced graph with mirrored pair coefficients.

        ``alpha``/``beta`` give one value per *pair*; the incoming and the
        outgoing edge of a pair share coefficients.
        """
        alpha = tuple(alpha) if alpha is not None else (1.0,) * n
        beta = tuple(beta) if beta is not None else (-1.0,) * n
        if len(alpha) != n or len(beta) != n:
            raise ValueError("need one coefficient per edge pair")
        return cls(n, n, alpha + alpha, beta + beta)


@dataclass(frozen=True)
class GraphGrid:
    """Uniform truncated grid: N + 1 nodes per edge, spacing h = L / N.

    Incoming edges are sampled on ``linspace(-L, 0, N + 1)`` (vertex last),
    outgoing edges on ``linspace(0, L, N + 1)`` (vertex first).
    """

    graph: StarGraph
    L: float
    N: int
    x_minus: np.ndarray = field(repr=False, default=None)
    x_plus: np.ndarray = field(repr=False, default=None)

    @property
    def h(self) -> float:
        return self.L / self.N

    def edge_x(self, e: int) -> np.ndarray:
        return self.x_minus if e < self.graph.m else self.x_plus


def build_grid(graph: StarGraph, L: float = 40.0, N: int = 2000) -> GraphGrid:
    if L <= 0 or N < 8:
        raise ValueError("need L > 0 and N >= 8")
    xm = np.linspace(-L, 0.0, N + 1)
    xp = np.linspace(0.0, L, N + 1)
    return GraphGrid(graph=graph, L=float(L), N=int(N), x_minus=xm, x_plus=xp)


class GraphFunction:
    """Per-edge samples of a scalar function on a :class:`GraphGrid`."""

    def __init__(self, grid: GraphGrid, values):
        values = [np.asarray(v) for v in values]
        if len(values) != grid.graph.edges:
            raise ValueError("need one value array per edge")
        for v in values:
            if v.shape != (grid.N + 1,):
                raise ValueError("each edge needs N + 1 samples")
        self.grid = grid
        self.values = values

    @classmethod
    def from_callables(cls, grid: GraphGrid, funcs) -> "GraphFunction":
        """``funcs`` is one callable per edge, evaluated on the edge grid."""
        vals = [np.asarray(f(grid.edge_x(e))) for e, f in enumerate(funcs)]
        return cls(grid, vals)

    def copy(self) -> "GraphFunction":
        return GraphFunction(self.grid, [v.copy() for v in self.values])

    def vertex_values(self) -> np.ndarray:
        """One-sided limits at the vertex, incoming edges first."""
        g = self.grid.graph
        vals = [self.values[e][-1] for e in range(g.m)]
        vals += [self.values[e][0] for e in range(g.m, g.edges)]
        return np.asarray(vals)

    def norm(self) -> float:
        return float(np.sqrt(inner_product(self, self).real))

    def __add__(self, other):
        return GraphFunction(
            self.grid, [a + b for a, b in zip(self.values, other.values)]
        )

    def __sub__(self, other):
        return GraphFunction(
            self.grid, [a - b for a, b in zip(self.values, other.values)]
        )

    def __mul__(self, c):
        return GraphFunction(self.grid, [c * v for v in self.values])

    __rmul__ = __mul__


def inner_product(f: GraphFunction, g: GraphFunction) -> complex:
    """L2 pairing over the graph, trapezoid rule edge by edge."""
    if f.grid is not g.grid and (f.grid.h != g.grid.h or f.grid.N != g.grid.N):
        raise ValueError("functions live on different grids")
    h = f.grid.h
    total = 0.0 + 0.0j
    for u, v in zip(f.values, g.values):
        total += np.trapezoid(np.conjugate(u) * v, dx=h)
    if abs(total.imag) == 0.0:
        return total.real
    return total


@dataclass(frozen=True)
class TraceSet:
    """One-sided vertex traces (value, first, second derivative) per edge."""

    u: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


# one-sided stencils at the vertex, order 2 (value side first)
_D1_IN = np.array([0.5, -2.0, 1.5])          # nodes -2h, -h, 0 on incoming edge
_D1_OUT = np.array([-1.5, 2.0, -0.5])        # nodes 0, h, 2h on outgoing edge
_D2 = np.array([2.0, -5.0, 4.0, -1.0])       # 4-point one-sided second derivative


def vertex_traces(f: GraphFunction) -> TraceSet:
    g = f.grid.graph
    h = f.grid.h
    u, d1, d2 = [], [], []
    for e in range(g.edges):
        v = f.values[e]
        if e < g.m:  # vertex is the last node, approach from the left
            u.append(v[-1])
            d1.append(np.dot(_D1_IN, v[-3:]) / h)
            d2.append(np.dot(_D2, v[::-1][:4]) / h**2)
        else:
            u.append(v[0])
            d1.append(np.dot(_D1_OUT, v[:3]) / h)
            d2.append(np.dot(_D2, v[:4]) / h**2)
    return TraceSet(u=np.asarray(u), d1=np.asarray(d1), d2=np.asarray(d2))


def embed_symmetric(f: GraphFunction, n: int) -> GraphFunction:
    """Replicate a two-half-line function onto a balanced n-pair graph."""
    if f.grid.graph.m != 1 or f.grid.graph.n != 1:
        raise ValueError("source must live on the two-half-line graph")
    g0 = f.grid.graph
    big = StarGraph.balanced_graph(n, (g0.alpha[0],) * n, (g0.beta[0],) * n)
    grid = build_grid(big, f.grid.L, f.grid.N)
    vals = [f.values[0].copy() for _ in range(n)] + [
        f.values[1].copy() for _ in range(n)
    ]
    return GraphFunction(grid, vals)
