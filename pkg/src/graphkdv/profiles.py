"""Stationary tail/bump profiles for KdV on a star graph.

On each mirrored edge pair the stationary equation

    alpha * phi'' - omega * phi + phi**2 = 0        (omega = -beta > 0)

is solved by a shifted sech^2 pulse.  The outgoing-edge component is

    phi_plus(x) = (3*omega/2) * sech(kappa*x - p)**2,
    kappa = sqrt(omega) / (2*sqrt(alpha)),  p = atanh(T),
    T = Z*sqrt(alpha) / (2*sqrt(omega)),

and the incoming component is its mirror image phi_minus(x) = phi_plus(-x).
The pair exists iff omega/alpha > Z**2/4; Z < 0 gives a "tail" (monotone
decay from the vertex), Z > 0 a "bump" (interior maximum), Z = 0 the
half-soliton.  The mirror symmetry forces the one-sided vertex slope to equal
(Z/2) * phi(0), which is what makes the profile satisfy the delta-type vertex
conditions with strength Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GraphFunction, GraphGrid, StarGraph

__all__ = [
    "soliton",
    "Profile",
    "make_profile",
    "check_vertex_conditions",
    "omega_derivative",
    "BalancedProfile",
    "make_balanced_profile",
    "profile_function",
]


def soliton(x, a: float = 1.0, b: float = -1.0, p: float = 0.0):
    """Whole-line stationary pulse -(3b/2) sech^2(sqrt(-b/a) x / 2 + p)."""
    if a <= 0 or b >= 0:
        raise ValueError("need a > 0 and b < 0 for a decaying pulse")
    y = 0.5 * math.sqrt(-b / a) * np.asarray(x, dtype=float) + p
    return -1.5 * b / np.cosh(y) ** 2


@dataclass(frozen=True)
class Profile:
    """Closed-form tail/bump pair on two mirrored half-lines."""

    Z: float
    omega: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.omega <= 0 or self.alpha <= 0:
            raise ValueError("need omega > 0 and alpha > 0")
        if self.omega / self.alpha <= 0.25 * self.Z**2:
            raise ValueError(
                "no profile: require omega/alpha > Z**2/4 "
                f"(got omega={self.omega}, alpha={self.alpha}, Z={self.Z})"
            )

    @property
    def beta(self) -> float:
        return -self.omega

    @property
    def kappa(self) -> float:
        return math.sqrt(self.omega) / (2.0 * math.sqrt(self.alpha))

    @property
    def T(self) -> float:
        """tanh of the phase shift; |T| < 1 is the existence condition."""
        return 0.5 * self.Z * math.sqrt(self.alpha) / math.sqrt(self.omega)

    @property
    def shift(self) -> float:
        return math.atanh(self.T)

    @property
    def kind(self) -> str:
        if self.Z > 0:
            return "bump"
        if self.Z < 0:
            return "tail"
        return "half_soliton"

    # -- outgoing edge, closed forms ------------------------------------
    def _st(self, x):
        y = self.kappa * np.asarray(x, dtype=float) - self.shift
        return 1.0 / np.cosh(y), np.tanh(y)

    def plus(self, x):
        s, _ = self._st(x)
        return 1.5 * self.omega * s**2

    def plus_d1(self, x):
        s, t = self._st(x)
        return -3.0 * self.omega * self.kappa * s**2 * t

    def plus_d2(self, x):
        s, t = self._st(x)
        return -3.0 * self.omega * self.kappa**2 * s**2 * (s**2 - 2.0 * t**2)

    def plus_d3(self, x):
        s, t = self._st(x)
        return -12.0 * self.omega * self.kappa**3 * s**2 * t * (t**2 - 2.0 * s**2)

    # -- incoming edge is the mirror image ------------------------------
    def minus(self, x):
        return self.plus(-np.asarray(x, dtype=float))

    def minus_d1(self, x):
        return -self.plus_d1(-np.asarray(x, dtype=float))

    def minus_d2(self, x):
        return self.plus_d2(-np.asarray(x, dtype=float))

    def minus_d3(self, x):
        return -self.plus_d3(-np.asarray(x, dtype=float))

    def vertex_value(self) -> float:
        return float(self.plus(0.0))

    def stationarity_residual(self, x) -> np.ndarray:
        """alpha*phi'' - omega*phi + phi^2 evaluated on the outgoing edge."""
        phi = self.plus(x)
        return self.alpha * self.plus_d2(x) - self.omega * phi + phi**2

    # -- mass and its frequency slope -----------------------------------
    def mass(self) -> float:
        """L2 norm squared over both half-lines, in closed form."""
        T = self.T
        return (
            9.0
            * math.sqrt(self.alpha)
            * self.omega**1.5
            * (2.0 / 3.0 + T - T**3 / 3.0)
        )

    def mass_slope(self) -> float:
        """d/d(omega) of the mass at this profile's omega."""
        T = self.T
        w = self.omega
        # dT/domega = -T / (2 omega)
        return 9.0 * math.sqrt(self.alpha) * (
            1.5 * math.sqrt(w) * (2.0 / 3.0 + T - T**3 / 3.0)
            + w**1.5 * (1.0 - T**2) * (-T / (2.0 * w))
        )

    def pairing_with_omega_derivative(self) -> float:
        """<psi, phi> with psi = -d(phi)/d(omega); equals -mass_slope/2."""
        return -0.5 * self.mass_slope()


def make_profile(Z: float, omega: float = 1.0, alpha: float = 1.0) -> Profile:
    return Profile(Z=float(Z), omega=float(omega), alpha=float(alpha))


def omega_derivative(profile: Profile, x, side: str = "plus") -> np.ndarray:
    """Analytic d(phi)/d(omega) at fixed Z, alpha (used as the kernel datum).

    With y = kappa*x - p and T = Z sqrt(alpha)/(2 sqrt(omega)):
        d(phi)/d(omega) = (3/2) sech^2 y - 3 omega sech^2 y tanh y * dy/domega,
        dy/domega = x / (4 sqrt(alpha omega)) + T / (2 omega (1 - T^2)).
    """
    x = np.asarray(x, dtype=float)
    if side == "minus":
        return omega_derivative(profile, -x, side="plus")
    w, a, T = profile.omega, profile.alpha, profile.T
    s, t = profile._st(x)
    dy = x / (4.0 * math.sqrt(a * w)) + T / (2.0 * w * (1.0 - T**2))
    return 1.5 * s**2 - 3.0 * w * s**2 * t * dy


def check_vertex_conditions(profile: Profile) -> dict:
    """Residuals of the third-order vertex conditions, from closed forms.

    Returns the jump residuals of

        u(0-) = u(0+),
        u'(0+) - u'(0-)  = Z u(0),
        u''(0+) - u''(0-) = (Z^2/2) u(0) + Z u'(0-),

    together with the mirror-slope identity phi'(0+) = (Z/2) phi(0) and the
    worst stationarity residual on a sample of the outgoing edge.
    """
    Z = profile.Z
    u0m, u0p = profile.minus(0.0), profile.plus(0.0)
    d1m, d1p = profile.minus_d1(0.0), profile.plus_d1(0.0)
    d2m, d2p = profile.minus_d2(0.0), profile.plus_d2(0.0)
    xs = np.linspace(0.0, 40.0, 4001)
    return {
        "continuity": float(abs(u0p - u0m)),
        "first_jump": float(abs(d1p - d1m - Z * u0m)),
        "second_jump": float(abs(d2p - d2m - 0.5 * Z**2 * u0m - Z * d1m)),
        "mirror_slope": float(abs(d1p - 0.5 * Z * u0p)),
        "stationarity": float(np.max(np.abs(profile.stationarity_residual(xs)))),
    }


@dataclass(frozen=True)
class BalancedProfile:
    """One mirrored profile per edge pair of a balanced graph.

    All pairs share the vertex strength Z.  The family fits together at the
    vertex only if beta_i + (Z^2/4) alpha_i is the same for every pair
    (common vertex value) and sum(alpha_i) = n (flux normalisation).
    """

    profiles: tuple[Profile, ...]

    @property
    def Z(self) -> float:
        return self.profiles[0].Z

    @property
    def n(self) -> int:
        return len(self.profiles)

    def vertex_value(self) -> float:
        return self.profiles[0].vertex_value()

    def graph(self) -> StarGraph:
        return StarGraph.balanced_graph(
            self.n,
            tuple(p.alpha for p in self.profiles),
            tuple(p.beta for p in self.profiles),
        )


def make_balanced_profile(
    Z: float, alphas, betas, tol: float = 1e-12
) -> BalancedProfile:
    """Build and validate a balanced-graph profile family.

    Raises ``ValueError`` unless beta_i + (Z^2/4) alpha_i is constant across
    pairs and the alphas sum to the number of pairs.
    """
    alphas = [float(a) for a in alphas]
    betas = [float(b) for b in betas]
    if len(alphas) != len(betas):
        raise ValueError("need matching alpha/beta lists")
    n = len(alphas)
    combo = [b + 0.25 * Z**2 * a for a, b in zip(alphas, betas)]
    if max(combo) - min(combo) > tol * max(1.0, abs(combo[0])):
        raise ValueError(
            "pairs do not share a vertex value: beta_i + (Z^2/4) alpha_i "
            f"varies ({combo})"
        )
    if abs(sum(alphas) - n) > tol * n:
        raise ValueError(f"flux normalisation needs sum(alpha) = {n}, got {sum(alphas)}")
    profs = tuple(make_profile(Z, omega=-b, alpha=a) for a, b in zip(alphas, betas))
    return BalancedProfile(profiles=profs)


def profile_function(grid: GraphGrid, profile) -> GraphFunction:
    """Sample a profile (or balanced family) as a :class:`GraphFunction`."""
    g = grid.graph
    if isinstance(profile, Profile):
        pairs = [profile] * g.m
    else:
        pairs = list(profile.profiles)
    if len(pairs) != g.m or g.m != g.n:
        raise ValueError("profile family does not match the graph")
    vals = [p.minus(grid.x_minus) for p in pairs] + [p.plus(grid.x_plus) for p in pairs]
    return GraphFunction(grid, vals)
