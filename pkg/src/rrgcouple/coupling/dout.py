"""Coupling of the d-out graph O(n, d) inside G(n, p), p = x log n / n.

Easy regime (x >= 2.1): one directed G(n, p_vec) with p_vec = 1 - (1-p)^{1/2}
has undirected support G(n, p); each vertex keeps a uniform d-subset of its
out-neighbours.

Hard regime (1 < x < 2.1), eps = x - 1: three independent layers
E1 (directed, density from p1 = (eps/2) log n / n), E2 = G(n, p2) with
p2 = (1 + eps/2) log n / n, and E3 (directed, density from p2) exposed only on
bad-bad pairs.  A vertex is good when its E1 out-degree is at least d.  Bad
vertices draw d+1 labels with replacement and place them on E2 edges to good
vertices and E3 arcs to bad vertices, using the monotone coupling of
Bin(d+1, y/(n-1)) under Bin(y, p3_vec).  A last sprinkled layer makes the
outer graph exactly G(n, p).  Any failed event replaces the inner object by
an independent O(n, d) and marks the run as decoupled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..graphs import Digraph, Multigraph
from ..models import _bernoulli_pairs, sample_dout_digraph
from ..rng import as_generator
from .quantile import quantile_coupling
from .report import EmbeddingReport

EASY_X = 2.1
MIN_X = 1 + 1e-3


def directed_density(p: float) -> float:
    """``1 - (1 - p)^{1/2}``: an arc density whose undirected support has density ``p``."""
    return -math.expm1(0.5 * math.log1p(-p)) if p < 1 else 1.0


@dataclass
class BadVertexState:
    """Per bad vertex record of the label construction."""

    y: int
    t: int
    ell: int
    s: int
    A_X: tuple[int, ...]
    A_Y: tuple[int, ...]
    S_prime: tuple[int, ...]
    T: tuple[int, ...]
    U: tuple[int, ...]


@dataclass
class OutCouplingState:
    n: int
    d: int
    p: float
    x: float
    regime: str
    p1: float = 0.0
    p2: float = 0.0
    p3: float = 0.0
    pv1: float = 0.0
    pv3: float = 0.0
    sprinkle: float = 0.0
    good: np.ndarray | None = None
    bad: np.ndarray | None = None
    E1: np.ndarray | None = None
    E2: np.ndarray | None = None
    E3: np.ndarray | None = None
    per_bad: dict[int, BadVertexState] = field(default_factory=dict)
    F1: bool | None = None
    F2: bool | None = None
    F3: bool | None = None
    dominated: bool | None = None
    min_outdegree: int | None = None

    def union_law_residual(self) -> float:
        """``|(1-p) - (1-p1)(1-p2)(1-sprinkle)|``; zero up to rounding."""
        return abs((1 - self.p) - (1 - self.p1) * (1 - self.p2) * (1 - self.sprinkle))

    def summary(self) -> dict:
        out = {
            "regime": self.regime,
            "x": self.x,
            "F1": self.F1,
            "F2": self.F2,
            "F3": self.F3,
            "dominated": self.dominated,
            "min_outdegree": self.min_outdegree,
        }
        if self.bad is not None:
            out["num_bad"] = int(self.bad.size)
            out["num_good"] = int(self.n - self.bad.size)
        return out


def _first_k_per_group(gen, tails: np.ndarray, heads: np.ndarray, n: int, k: int) -> np.ndarray:
    """Uniform ``k``-subset of each tail's heads (tails with fewer keep everything)."""
    order = np.lexsort((gen.random(tails.size), tails))
    t, h = tails[order], heads[order]
    start = np.searchsorted(t, np.arange(1, n + 2))
    rank = np.arange(t.size) - start[t - 1]
    keep = rank < k
    return np.stack([t[keep], h[keep]], axis=1)


def _easy(n, p, d, gen, state: OutCouplingState):
    pv = directed_density(p)
    state.pv1 = pv
    state.p1 = p
    tails, heads = _bernoulli_pairs(gen, n, pv, directed=True)
    state.E1 = np.stack([tails, heads], axis=1)
    outdeg = np.bincount(tails, minlength=n + 1)[1:]
    state.min_outdegree = int(outdeg.min()) if n else 0
    outer = Multigraph.from_arrays(n, tails, heads).support()
    if state.min_outdegree >= d:
        inner = Digraph(n, _first_k_per_group(gen, tails, heads, n, d))
        return inner, outer, False
    return None, outer, True


def _hard(n, p, d, gen, state: OutCouplingState, strict_f1: bool):
    ln = math.log(n)
    eps = state.x - 1.0
    p1 = (eps / 2) * ln / n
    p2 = (1 + eps / 2) * ln / n
    if p1 + p2 > p + 1e-15:
        raise AssertionError("layer densities exceed p")
    pv1, pv3 = directed_density(p1), directed_density(p2)
    sprinkle = max(0.0, 1.0 - (1.0 - p) / ((1.0 - p1) * (1.0 - p2)))
    state.p1, state.p2, state.p3, state.pv1, state.pv3, state.sprinkle = p1, p2, p2, pv1, pv3, sprinkle

    # layer 1
    t1, h1 = _bernoulli_pairs(gen, n, pv1, directed=True)
    state.E1 = np.stack([t1, h1], axis=1)
    outdeg1 = np.bincount(t1, minlength=n + 1)[1:]
    is_bad = np.zeros(n + 1, dtype=bool)
    is_bad[1:] = outdeg1 < d
    bad = np.flatnonzero(is_bad)
    state.bad = bad
    state.good = np.flatnonzero(~is_bad[1:]) + 1
    b = bad.size

    # layer 2, bad-bad pairs removed (they belong to layer 3)
    u2, v2 = _bernoulli_pairs(gen, n, p2, directed=False)
    keep2 = ~(is_bad[u2] & is_bad[v2])
    u2, v2 = u2[keep2], v2[keep2]
    state.E2 = np.stack([u2, v2], axis=1)

    # layer 3 on ordered bad-bad pairs only
    if b >= 2:
        a3, c3 = _bernoulli_pairs(gen, b, pv3, directed=True)
        t3, h3 = bad[a3 - 1], bad[c3 - 1]
    else:
        t3 = h3 = np.zeros(0, np.int64)
    state.E3 = np.stack([t3, h3], axis=1)

    # sprinkled remainder so that the union is exactly G(n, p)
    us, vs = _bernoulli_pairs(gen, n, sprinkle, directed=False)
    outer = Multigraph.from_arrays(
        n, np.concatenate([t1, u2, t3, us]), np.concatenate([h1, v2, h3, vs])
    ).support()

    state.F1 = b <= n ** (1 - eps / 8)
    # E2' edges with exactly one bad endpoint, tail at the bad one
    one_bad = is_bad[u2] ^ is_bad[v2]
    tails2 = np.where(is_bad[u2[one_bad]], u2[one_bad], v2[one_bad])
    heads2 = np.where(is_bad[u2[one_bad]], v2[one_bad], u2[one_bad])
    s_deg = np.bincount(tails2, minlength=n + 1)
    state.F2 = bool(np.all(s_deg[bad] >= d + 1)) if b else True
    y = max(b - 1, 0)
    qc = quantile_coupling(("binom", d + 1, y / (n - 1)), ("binom", y, pv3))
    state.dominated = qc.dominated
    if (strict_f1 and not state.F1) or not state.F2 or not state.dominated:
        return None, outer, True

    good_arcs = np.isin(t1, state.good)
    arcs = [_first_k_per_group(gen, t1[good_arcs], h1[good_arcs], n, d)]
    order2 = np.argsort(tails2, kind="stable")
    tails2, heads2 = tails2[order2], heads2[order2]
    order3 = np.argsort(t3, kind="stable")
    t3, h3 = t3[order3], h3[order3]
    x_count = n - 1 - y
    F3 = True
    for v in bad.tolist():
        lo, hi = np.searchsorted(tails2, [v, v + 1])
        S = heads2[lo:hi]
        lo, hi = np.searchsorted(t3, [v, v + 1])
        T = h3[lo:hi]
        t = int(T.size)
        ell = int(qc.sample_x_given_y(gen, np.array([t]))[0])
        A_Y = np.unique(gen.integers(1, y + 1, size=ell)) if ell else np.zeros(0, np.int64)
        A_X = np.unique(gen.integers(y + 1, y + x_count + 1, size=d + 1 - ell))
        uY, uX = A_Y.size, A_X.size
        if uY + uX < d or uY > t:
            F3 = F3 and (uY + uX >= d)
            state.per_bad[v] = BadVertexState(y, t, ell, int(S.size), tuple(A_X.tolist()), tuple(A_Y.tolist()), (), tuple(T.tolist()), ())
            if uY > t:
                state.dominated = False
            continue
        S_prime = gen.choice(S, size=d + 1, replace=False)
        picked = np.concatenate([gen.choice(S_prime, size=uX, replace=False), gen.choice(T, size=uY, replace=False)])
        U = picked
        if picked.size > d:
            U = gen.choice(picked, size=d, replace=False)
        state.per_bad[v] = BadVertexState(
            y, t, ell, int(S.size), tuple(A_X.tolist()), tuple(A_Y.tolist()),
            tuple(S_prime.tolist()), tuple(T.tolist()), tuple(sorted(U.tolist())),
        )
        arcs.append(np.stack([np.full(U.size, v), U], axis=1))
    state.F3 = F3
    if not F3 or not state.dominated:
        return None, outer, True
    return Digraph(n, np.concatenate(arcs)), outer, False


def dout_gnp_embed(
    n: int,
    p: float,
    d: int,
    rng=None,
    strict_f1: bool = True,
    keep_state: bool = False,
) -> EmbeddingReport:
    """One coupled draw of ``(O_vec(n, d), G(n, p))``.

    ``inner`` is the d-out digraph, ``outer`` the undirected ``G(n, p)``;
    containment is checked after dropping orientations.  With
    ``strict_f1=False`` the bad-vertex count bound is not enforced (the label
    construction only needs the binomial domination, which is checked
    exactly).  ``keep_state`` attaches the full :class:`OutCouplingState`.
    """
    if n < 2 or not 1 <= d <= n - 1:
        raise ValueError(f"need n >= 2 and 1 <= d <= n - 1, got n={n}, d={d}")
    if not 0 < p <= 1:
        raise ValueError(f"p must be in (0, 1], got {p}")
    x = p * n / math.log(n)
    if x < MIN_X:
        raise ValueError(f"x = pn/log n = {x:.4g} below {MIN_X}")
    gen = as_generator(rng)
    regime = "easy" if x >= EASY_X else "hard"
    state = OutCouplingState(n, d, p, x, regime)
    if regime == "easy":
        inner, outer, failed = _easy(n, p, d, gen, state)
    else:
        inner, outer, failed = _hard(n, p, d, gen, state, strict_f1)
    if failed:
        inner = sample_dout_digraph(n, d, gen)
    diag = state.summary()
    if failed:
        diag["fallback"] = "stage failure: inner drawn independently"
    if keep_state:
        diag["state"] = state
    return EmbeddingReport(inner, outer, decoupled=failed, diagnostics=diag)
