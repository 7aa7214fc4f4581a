"""Asymptotic degree-sequence enumeration formulas, evaluated in log space.

The evaluators return the main term only.  The argument of each ``O(.)``
remainder is returned alongside so that callers can bound the log-ratio
against an exact oracle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .counting import count_bipartite_constrained


@dataclass(frozen=True)
class BipartiteDegreePair:
    """Degrees ``s`` on side U and ``t`` on side V, both sorted descending."""

    s: tuple[int, ...]
    t: tuple[int, ...]

    def __post_init__(self):
        s = tuple(sorted((int(x) for x in self.s), reverse=True))
        t = tuple(sorted((int(x) for x in self.t), reverse=True))
        if any(x < 0 for x in s + t):
            raise ValueError("degrees must be nonnegative")
        if sum(s) != sum(t):
            raise ValueError(f"side sums differ: {sum(s)} != {sum(t)}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)

    @property
    def M(self) -> int:
        return sum(self.s)

    @property
    def Delta(self) -> int:
        return max(self.s + self.t, default=0)

    @property
    def J(self) -> int:
        """Upper bound on the number of 2-paths starting at any vertex."""
        s1 = self.s[0] if self.s else 0
        t1 = self.t[0] if self.t else 0
        return sum(self.t[:s1]) + sum(self.s[:t1])


@dataclass(frozen=True)
class AvoidanceInstance:
    """Degree sequence ``g`` on ``[n]`` and a simple forbidden graph ``X`` (1-based pairs)."""

    g: tuple[int, ...]
    X: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        g = tuple(int(x) for x in self.g)
        n = len(g)
        X = frozenset((min(a, b), max(a, b)) for a, b in self.X)
        for a, b in X:
            if a == b or not (1 <= a <= n and 1 <= b <= n):
                raise ValueError(f"bad forbidden edge {(a, b)}")
        if any(x < 0 for x in g):
            raise ValueError("degrees must be nonnegative")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "X", X)

    @property
    def M(self) -> int:
        return sum(self.g)

    @property
    def x(self) -> tuple[int, ...]:
        deg = [0] * len(self.g)
        for a, b in self.X:
            deg[a - 1] += 1
            deg[b - 1] += 1
        return tuple(deg)

    @property
    def lam(self) -> float:
        return sum(gi * (gi - 1) for gi in self.g) / (2 * self.M)

    @property
    def mu(self) -> float:
        return sum(self.g[a - 1] * self.g[b - 1] for a, b in self.X) / self.M

    @property
    def Delta_hat(self) -> int:
        dg = max(self.g, default=0)
        return dg * dg + dg * max(self.x, default=0)


@dataclass(frozen=True)
class Estimate:
    """Main-term value (``log_value`` is authoritative; ``value`` may overflow to inf)."""

    log_value: float
    remainder_arg: float
    in_regime: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def value(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf


def mckay_bipartite_estimate(dp: BipartiteDegreePair) -> Estimate:
    """``M! / (prod s_i! prod t_j!) * exp(-S2(s) S2(t) / (2 M^2))``.

    The remainder argument is ``Delta^4 / M``.  ``Delta^2 >= M/6`` lies outside
    the hypothesis of the asymptotic formula; it is still evaluated but
    ``in_regime`` is False and a warning is issued.
    """
    M = dp.M
    if M < 1:
        raise ValueError("need M >= 1")
    log_main = math.lgamma(M + 1) - sum(math.lgamma(x + 1) for x in dp.s) - sum(math.lgamma(x + 1) for x in dp.t)
    ss = sum(x * (x - 1) for x in dp.s)
    tt = sum(x * (x - 1) for x in dp.t)
    corr = -ss * tt / (2 * M * M)
    D = dp.Delta
    in_regime = 1 <= D * D < M / 6
    if not in_regime:
        warnings.warn(f"Delta^2 = {D * D} >= M/6 = {M / 6:.3g}: outside the formula's hypothesis", stacklevel=2)
    return Estimate(log_main + corr, D**4 / M, in_regime, {"M": M, "Delta": D, "J": dp.J, "exponent": corr})


def mckay_avoiding_estimate(inst: AvoidanceInstance) -> Estimate:
    """``M! / ((M/2)! 2^{M/2} prod g_i!) * exp(-lambda - lambda^2 - mu)``.

    Remainder argument ``Delta_hat^2 / M``.  Diagnostics carry ``lambda``,
    ``mu`` and ``Delta_hat``.
    """
    M = inst.M
    if max(inst.g, default=0) < 1:
        raise ValueError("need max degree >= 1")
    if M % 2:
        raise ValueError("degree sum must be even")
    lam, mu, dh = inst.lam, inst.mu, inst.Delta_hat
    log_main = (
        math.lgamma(M + 1) - math.lgamma(M // 2 + 1) - (M // 2) * math.log(2) - sum(math.lgamma(x + 1) for x in inst.g)
    )
    return Estimate(
        log_main - lam - lam * lam - mu,
        dh * dh / M,
        dh < M,
        {"lambda": lam, "mu": mu, "Delta_hat": dh, "M": M},
    )


@dataclass(frozen=True)
class EdgeProbability:
    probability: Fraction | float
    xi: float | None
    mode: str
    flagged: bool = False
    support_size: int | None = None


def _bip_degrees(edges: Iterable[tuple[int, int]], nu: int, nv: int) -> tuple[list[int], list[int]]:
    du, dv = [0] * nu, [0] * nv
    for u, v in edges:
        du[u - 1] += 1
        dv[v - 1] += 1
    return du, dv


def conditional_edge_probability(
    s: Sequence[int],
    t: Sequence[int],
    H1: Iterable[tuple[int, int]],
    H2: Iterable[tuple[int, int]],
    uv: tuple[int, int],
    mode: str = "estimate",
) -> EdgeProbability:
    """``P(uv in B(s, t) | H1 in B, H2 disjoint from B)``.

    Vertices are positions into ``s`` and ``t`` (1-based) in the order given;
    edges are ``(u, v)`` pairs.  ``mode="estimate"`` gives the main term
    ``(s_u - d^H1_u)(t_v - d^H1_v) / (M - e(H1))`` with its ``xi``;
    ``mode="exact"`` enumerates the conditional space.
    """
    H1, H2 = set(H1), set(H2)
    if H1 & H2:
        raise ValueError("H1 and H2 must be disjoint")
    if uv in H1 or uv in H2:
        raise ValueError("uv must lie outside H1 and H2")
    nu, nv = len(s), len(t)
    d1u, d1v = _bip_degrees(H1, nu, nv)
    if any(a > b for a, b in zip(d1u + d1v, list(s) + list(t))):
        raise ValueError("H1 degrees exceed the target degrees")
    u, v = uv
    if mode == "exact":
        base = count_bipartite_constrained(s, t, forced=H1, forbidden=H2)
        if base == 0:
            raise ValueError("conditional support is empty")
        hit = count_bipartite_constrained(s, t, forced=H1 | {uv}, forbidden=H2)
        return EdgeProbability(Fraction(hit, base), None, mode, support_size=base)
    if mode != "estimate":
        raise ValueError(f"unknown mode {mode!r}")
    dp = BipartiteDegreePair(s, t)
    M, e1 = dp.M, len(H1)
    denom = M - e1
    if denom <= 0:
        raise ValueError("H1 already uses every edge")
    prod_res = (s[u - 1] - d1u[u - 1]) * (t[v - 1] - d1v[v - 1])
    d2u, d2v = _bip_degrees(H2, nu, nv)
    delta_h2 = max(d2u + d2v, default=0)
    ds, dt = max(s, default=0), max(t, default=0)
    xi = (dp.J + dp.Delta * (1 + delta_h2) + prod_res) / denom + len(H2) * ds * dt / denom**2
    flagged = xi >= 1
    if flagged:
        warnings.warn(f"xi = {xi:.3g} >= 1: the estimate carries no information", stacklevel=2)
    return EdgeProbability(prod_res / denom, xi, mode, flagged)
