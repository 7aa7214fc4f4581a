"""Optimal couplings with a forbidden relation on enumerated spaces.

The minimal failure probability ``min P((X, Y) in B)`` over couplings equals
``max_A mu_X(A) - mu_Y(N(A))`` where ``N(A)`` is the set of ``y`` related to
some ``x in A`` by an allowed pair.  It is ``1 - maxflow`` of the network
source -> x (capacity mu_X(x)) -> y (infinite, allowed pairs only) -> sink
(capacity mu_Y(y)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable

import networkx as nx
import numpy as np
from networkx.algorithms.flow import edmonds_karp

from ..distributions import FiniteDistribution

Relation = Callable[[object, object], bool] | Iterable[tuple[object, object]]

MARGINAL_TOL = 1e-9


def bad_matrix(muX: FiniteDistribution, muY: FiniteDistribution, bad: Relation) -> np.ndarray:
    """Materialise ``bad`` as a boolean ``|Omega_X| x |Omega_Y|`` matrix."""
    if isinstance(bad, np.ndarray):
        if bad.shape != (len(muX), len(muY)):
            raise ValueError("relation matrix has the wrong shape")
        return bad.astype(bool)
    if callable(bad):
        return np.array([[bool(bad(x, y)) for y in muY.outcomes] for x in muX.outcomes], dtype=bool).reshape(
            len(muX), len(muY)
        )
    pairs = set(bad)
    return np.array([[(x, y) in pairs for y in muY.outcomes] for x in muX.outcomes], dtype=bool).reshape(
        len(muX), len(muY)
    )


def inequality(x, y) -> bool:
    """The relation ``x != y`` (failure of an equality coupling)."""
    return x != y


@dataclass
class JointCoupling:
    """Joint weights over ``xs x ys``; ``bad`` marks the failure relation."""

    xs: tuple
    ys: tuple
    weights: dict[tuple[int, int], Fraction | float]
    bad: np.ndarray
    info: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return all(isinstance(w, (int, Fraction)) for w in self.weights.values())

    def _zero(self):
        return Fraction(0) if self.exact else 0.0

    def marginal_x(self) -> list:
        out = [self._zero()] * len(self.xs)
        for (i, _), w in self.weights.items():
            out[i] += w
        return out

    def marginal_y(self) -> list:
        out = [self._zero()] * len(self.ys)
        for (_, j), w in self.weights.items():
            out[j] += w
        return out

    @property
    def failure_mass(self):
        return sum((w for (i, j), w in self.weights.items() if self.bad[i, j]), self._zero())

    def check_marginals(self, muX: FiniteDistribution, muY: FiniteDistribution, tol: float = MARGINAL_TOL) -> bool:
        mx, my = self.marginal_x(), self.marginal_y()
        if self.exact and muX.exact and muY.exact:
            return list(mx) == list(muX.probs) and list(my) == list(muY.probs)
        return bool(
            np.allclose(np.array(mx, float), np.array(muX.probs, float), atol=tol, rtol=0)
            and np.allclose(np.array(my, float), np.array(muY.probs, float), atol=tol, rtol=0)
        )

    def sample(self, gen: np.random.Generator, size: int | None = None):
        keys = list(self.weights)
        p = np.array([float(self.weights[k]) for k in keys])
        idx = gen.choice(len(keys), size=size, p=p / p.sum())
        if size is None:
            i, j = keys[int(idx)]
            return self.xs[i], self.ys[j]
        return [(self.xs[keys[k][0]], self.ys[keys[k][1]]) for k in idx]

    def triples(self) -> list[tuple[object, object, Fraction | float]]:
        return [(self.xs[i], self.ys[j], w) for (i, j), w in sorted(self.weights.items()) if w != 0]


@dataclass(frozen=True)
class Deficiency:
    value: Fraction | float
    witness: tuple  # outcomes of Omega_X forming the maximising set A
    flow: dict = field(repr=False, default_factory=dict)


def _network(muX: FiniteDistribution, muY: FiniteDistribution, B: np.ndarray) -> nx.DiGraph:
    G = nx.DiGraph()
    G.add_node("s")
    G.add_node("t")
    for i, p in enumerate(muX.probs):
        G.add_edge("s", ("x", i), capacity=p)
    for j, q in enumerate(muY.probs):
        G.add_edge(("y", j), "t", capacity=q)
    for i, j in zip(*np.nonzero(~B)):
        # no capacity attribute: networkx treats the arc as unbounded
        G.add_edge(("x", int(i)), ("y", int(j)))
    return G


def _solve(muX, muY, B):
    G = _network(muX, muY, B)
    R = edmonds_karp(G, "s", "t")
    flow_value = R.graph["flow_value"]
    # X-side vertices reachable from the source in the residual network
    seen = {"s"}
    stack = ["s"]
    while stack:
        u = stack.pop()
        for v, attr in R[u].items():
            if v not in seen and attr["capacity"] - attr["flow"] > 0:
                seen.add(v)
                stack.append(v)
    witness = tuple(muX.outcomes[i] for i in range(len(muX)) if ("x", i) in seen)
    flows = {}
    for i in range(len(muX)):
        for v, attr in R[("x", i)].items():
            if v != "s" and v[0] == "y" and attr["flow"] > 0:
                flows[(i, v[1])] = attr["flow"]
    return flow_value, witness, flows


def strassen_deficiency(muX: FiniteDistribution, muY: FiniteDistribution, bad: Relation) -> Deficiency:
    """Minimal achievable ``P((X, Y) in bad)`` with witness ``A`` attaining
    ``mu_X(A) - mu_Y(N(A))``."""
    B = bad_matrix(muX, muY, bad)
    flow_value, witness, flows = _solve(muX, muY, B)
    one = Fraction(1) if (muX.exact and muY.exact) else 1.0
    value = one - flow_value
    if not (muX.exact and muY.exact):
        value = max(0.0, float(value))
    return Deficiency(value, witness, flows)


def deficiency_bruteforce(muX: FiniteDistribution, muY: FiniteDistribution, bad: Relation):
    """Scan every subset ``A`` of ``Omega_X`` (oracle for small spaces)."""
    B = bad_matrix(muX, muY, bad)
    best = Fraction(0) if (muX.exact and muY.exact) else 0.0
    nx_ = len(muX)
    allowed = [set(np.flatnonzero(~B[i]).tolist()) for i in range(nx_)]
    for r in range(1, nx_ + 1):
        for A in combinations(range(nx_), r):
            NA = set().union(*(allowed[i] for i in A))
            val = sum(muX.probs[i] for i in A) - sum(muY.probs[j] for j in NA)
            if val > best:
                best = val
    return best


def build_optimal_coupling(muX: FiniteDistribution, muY: FiniteDistribution, bad: Relation) -> JointCoupling:
    """Joint law with marginals ``muX``, ``muY`` and minimal failure mass.

    The max flow carries the allowed mass; what is left on each side is
    paired off by a northwest-corner sweep in outcome order.  Any residual
    pair is necessarily a bad pair, otherwise the flow was not maximal.
    """
    B = bad_matrix(muX, muY, bad)
    flow_value, witness, flows = _solve(muX, muY, B)
    exact = muX.exact and muY.exact
    weights: dict[tuple[int, int], Fraction | float] = dict(flows)
    rx = list(muX.probs)
    ry = list(muY.probs)
    for (i, j), w in flows.items():
        rx[i] -= w
        ry[j] -= w
    tiny = 0 if exact else 1e-15
    i = j = 0
    while i < len(rx) and j < len(ry):
        if rx[i] <= tiny:
            i += 1
            continue
        if ry[j] <= tiny:
            j += 1
            continue
        w = min(rx[i], ry[j])
        weights[(i, j)] = weights.get((i, j), 0) + w
        rx[i] -= w
        ry[j] -= w
    coupling = JointCoupling(muX.outcomes, muY.outcomes, weights, B, {"witness": witness})
    if not coupling.check_marginals(muX, muY):
        raise AssertionError("coupling marginals drifted from the inputs")
    return coupling


@dataclass(frozen=True)
class DegreeCouplingResult:
    delta: float
    eps: float
    bound: float
    coupling: JointCoupling


def degree_coupling(S: Iterable, T: Iterable, D: Iterable[tuple[object, object]]) -> DegreeCouplingResult:
    """Uniform coupling of ``S`` and ``T`` avoiding ``(S x T) \\ D`` as much as possible.

    ``(delta, eps)`` minimises ``2 delta + eps / (1 - eps)`` subject to the
    degree conditions ``deg_D(x) >= (1 - eps)|D|/|S|`` on all but a
    ``delta`` fraction of ``S`` (and the same on ``T``).  The coupling itself
    is the flow-optimal one, so its failure mass never exceeds the bound.
    """
    S, T = list(S), list(T)
    D = set(D)
    if not D:
        raise ValueError("D must be nonempty")
    degS = {s: 0 for s in S}
    degT = {t: 0 for t in T}
    for s, t in D:
        if s not in degS or t not in degT:
            raise ValueError(f"pair {(s, t)} outside S x T")
        degS[s] += 1
        degT[t] += 1
    m = len(D)
    ratioS = np.array([degS[s] * len(S) / m for s in S])
    ratioT = np.array([degT[t] * len(T) / m for t in T])
    cands = {0.0}
    cands.update(float(1 - r) for r in np.concatenate([ratioS, ratioT]) if 0 < 1 - r < 1)
    best = None
    for eps in sorted(cands):
        thr = 1 - eps - 1e-12
        dS = float(np.mean(ratioS < thr))
        dT = float(np.mean(ratioT < thr))
        delta = max(dS, dT)
        bound = 2 * delta + eps / (1 - eps)
        if best is None or bound < best[2] - 1e-15:
            best = (delta, eps, bound)
    muS = FiniteDistribution.uniform(S)
    muT = FiniteDistribution.uniform(T)
    coupling = build_optimal_coupling(muS, muT, lambda s, t: (s, t) not in D)
    return DegreeCouplingResult(best[0], best[1], best[2], coupling)
