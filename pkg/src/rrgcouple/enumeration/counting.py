"""Exact counting oracles (arbitrary-precision integers, desk-scale sizes)."""

from __future__ import annotations

import warnings
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial, prod
from typing import Iterable, Sequence

import numpy as np

from ..graphs import Multigraph


class InstanceTooLarge(ValueError):
    """The instance is beyond the size an exact oracle is allowed to attempt."""


def double_factorial(k: int) -> int:
    """``k!!`` with the convention ``(-1)!! = 0!! = 1``."""
    if k <= 0:
        return 1
    return prod(range(k, 0, -2))


def num_perfect_matchings(n: int) -> int:
    """Number of perfect matchings of ``K_n``: ``(n-1)!!`` (0 for odd n)."""
    if n % 2:
        return 0
    return double_factorial(n - 1)


# -- bipartite graphs with given degrees -----------------------------------


def _check_bipartite(s: Sequence[int], t: Sequence[int], max_edges: int) -> None:
    if any(x < 0 for x in (*s, *t)):
        raise ValueError("degrees must be nonnegative")
    if sum(s) != sum(t):
        raise ValueError(f"side sums differ: {sum(s)} != {sum(t)}")
    if sum(s) > max_edges:
        raise InstanceTooLarge(f"M = {sum(s)} exceeds the exact-count cap {max_edges}")


def exact_bipartite_count(s: Sequence[int], t: Sequence[int], max_edges: int = 60) -> int:
    """Number of simple bipartite graphs with degree sequence ``(s, t)``.

    Backtracks over the V side; U vertices are grouped by residual degree, so
    the memo key is the histogram of residual U-degrees.
    """
    _check_bipartite(s, t, max_edges)
    top = max(s, default=0)
    t_sorted = tuple(sorted(t, reverse=True))
    hist0 = [0] * (top + 1)
    for x in s:
        hist0[x] += 1

    @lru_cache(maxsize=None)
    def go(j: int, hist: tuple[int, ...]) -> int:
        if j == len(t_sorted):
            return 1 if all(c == 0 for c in hist[1:]) else 0
        need = t_sorted[j]
        total = 0
        # choose k_r vertices among the hist[r] vertices with residual r >= 1
        levels = [r for r in range(1, len(hist)) if hist[r]]

        def split(idx: int, left: int, ways: int, new: list[int]) -> None:
            nonlocal total
            if left == 0:
                total += ways * go(j + 1, tuple(new))
                return
            if idx == len(levels):
                return
            r = levels[idx]
            for k in range(min(left, hist[r]) + 1):
                if k:
                    new[r] -= k
                    new[r - 1] += k
                split(idx + 1, left - k, ways * comb(hist[r], k), new)
                if k:
                    new[r] += k
                    new[r - 1] -= k

        split(0, need, 1, list(hist))
        return total

    return go(0, tuple(hist0))


def exact_bipartite_count_dp(s: Sequence[int], t: Sequence[int], max_edges: int = 40) -> int:
    """Independent second oracle: cell-by-cell fill of the 0/1 biadjacency matrix.

    Rows are U vertices, columns V vertices; the state is the residual column
    sums plus the residual of the current row.
    """
    _check_bipartite(s, t, max_edges)
    rows, cols = tuple(s), len(t)

    @lru_cache(maxsize=None)
    def go(i: int, j: int, row_left: int, col_left: tuple[int, ...]) -> int:
        if i == len(rows):
            return 1 if not any(col_left) else 0
        if j == cols:
            if row_left:
                return 0
            return go(i + 1, 0, rows[i + 1] if i + 1 < len(rows) else 0, col_left)
        # prune: remaining columns cannot absorb the row
        if row_left > cols - j:
            return 0
        total = go(i, j + 1, row_left, col_left)
        if row_left and col_left[j]:
            cl = list(col_left)
            cl[j] -= 1
            total += go(i, j + 1, row_left - 1, tuple(cl))
        return total

    if not rows:
        return 1 if not any(t) else 0
    return go(0, 0, rows[0], tuple(t))


def count_bipartite_constrained(
    s: Sequence[int],
    t: Sequence[int],
    forced: Iterable[tuple[int, int]] = (),
    forbidden: Iterable[tuple[int, int]] = (),
    max_edges: int = 40,
) -> int:
    """Bipartite graphs with degrees ``(s, t)`` containing ``forced`` and avoiding
    ``forbidden``.  Edges are ``(u, v)`` with 1-based positions into ``s`` and ``t``."""
    _check_bipartite(s, t, max_edges)
    forced = set(forced)
    forbidden = set(forbidden)
    if forced & forbidden:
        return 0
    res_s = list(s)
    res_t = list(t)
    for u, v in forced:
        res_s[u - 1] -= 1
        res_t[v - 1] -= 1
    if min(res_s + res_t, default=0) < 0:
        return 0
    blocked = forced | forbidden
    nu = len(s)
    allowed = [tuple(u for u in range(nu) if (u + 1, j + 1) not in blocked) for j in range(len(t))]

    @lru_cache(maxsize=None)
    def go(j: int, res: tuple[int, ...]) -> int:
        if j == len(t):
            return 1 if not any(res) else 0
        total = 0
        cand = [u for u in allowed[j] if res[u] > 0]
        for pick in combinations(cand, res_t[j]):
            r = list(res)
            for u in pick:
                r[u] -= 1
            total += go(j + 1, tuple(r))
        return total

    return go(0, tuple(res_s))


# -- simple graphs with given degrees avoiding a forbidden graph -----------


def exact_avoiding_count(g: Sequence[int], forbidden: Iterable[tuple[int, int]] = (), max_degree_sum: int = 40) -> int:
    """Simple graphs on ``[n]`` with degree sequence ``g`` sharing no edge with ``forbidden``."""
    g = tuple(g)
    if any(x < 0 for x in g):
        raise ValueError("degrees must be nonnegative")
    if sum(g) > max_degree_sum:
        raise InstanceTooLarge(f"degree sum {sum(g)} exceeds the exact-count cap {max_degree_sum}")
    if sum(g) % 2:
        return 0
    n = len(g)
    bad = {(min(a, b), max(a, b)) for a, b in forbidden}
    allowed = [tuple(j for j in range(i + 1, n) if (i + 1, j + 1) not in bad) for i in range(n)]

    @lru_cache(maxsize=None)
    def go(i: int, res: tuple[int, ...]) -> int:
        if i == n:
            return 1
        need = res[0]
        rest = res[1:]
        cand = [k for k, j in enumerate(allowed[i]) if rest[j - i - 1] > 0]
        if need > len(cand):
            return 0
        total = 0
        for pick in combinations(cand, need):
            r = list(rest)
            for k in pick:
                r[allowed[i][k] - i - 1] -= 1
            total += go(i + 1, tuple(r))
        return total

    return go(0, g)


def enumerate_simple_graphs(g: Sequence[int], forbidden: Iterable[tuple[int, int]] = ()) -> list[Multigraph]:
    """All labeled simple graphs with degree sequence ``g`` avoiding ``forbidden``."""
    n = len(g)
    bad = {(min(a, b), max(a, b)) for a, b in forbidden}
    out: list[Multigraph] = []
    edges: list[tuple[int, int]] = []

    def go(i: int, res: list[int]) -> None:
        if i == n:
            out.append(Multigraph(n, list(edges)))
            return
        cand = [j for j in range(i + 1, n) if res[j] > 0 and (i + 1, j + 1) not in bad]
        for pick in combinations(cand, res[i]):
            for j in pick:
                res[j] -= 1
                edges.append((i + 1, j + 1))
            go(i + 1, res)
            for j in pick:
                res[j] += 1
                edges.pop()

    if sum(g) % 2 == 0:
        go(0, list(g))
    return out


# -- perfect matchings in a multigraph ------------------------------------


def _matching_weights(G: Multigraph, forbidden, multiplicity: bool) -> dict[tuple[int, int], int]:
    bad = {(min(a, b), max(a, b)) for a, b in forbidden}
    w = {}
    for (u, v), m in G.edges.items():
        if u == v or (u, v) in bad:
            continue
        w[(u, v)] = m if multiplicity else 1
    return w


def _apply_must_cover(n, weights, must_cover):
    """Force the pairs in ``must_cover``; returns (factor, removed vertex set)."""
    factor = 1
    used: set[int] = set()
    for a, b in must_cover:
        u, v = min(a, b), max(a, b)
        if u in used or v in used or (u, v) not in weights:
            return 0, used
        used.update((u, v))
        factor *= weights[(u, v)]
    return factor, used


def count_perfect_matchings(
    G: Multigraph,
    forbidden: Iterable[tuple[int, int]] = (),
    must_cover: Iterable[tuple[int, int]] = (),
    multiplicity: bool = True,
    max_n: int = 40,
) -> int:
    """Perfect matchings of ``G`` avoiding ``forbidden`` and matching every pair in ``must_cover``.

    With ``multiplicity=True`` parallel edges are distinct (each matching is
    weighted by the product of multiplicities: the pairing-level count);
    otherwise the simple support is used.  Loops never take part.  The
    recursion always branches on a remaining vertex of least degree.
    """
    n = G.n
    if n % 2:
        warnings.warn("odd vertex count: no perfect matching", stacklevel=2)
        return 0
    if n > max_n:
        raise InstanceTooLarge(f"n = {n} exceeds the matching-count cap {max_n}")
    weights = _matching_weights(G, forbidden, multiplicity)
    factor, used = _apply_must_cover(n, weights, must_cover)
    if factor == 0:
        return 0
    adj: list[dict[int, int]] = [dict() for _ in range(n)]
    for (u, v), w in weights.items():
        adj[u - 1][v - 1] = w
        adj[v - 1][u - 1] = w
    start = 0
    for v in range(n):
        if v + 1 not in used:
            start |= 1 << v
    memo: dict[int, int] = {0: 1}

    def go(mask: int) -> int:
        hit = memo.get(mask)
        if hit is not None:
            return hit
        best, best_deg = -1, n + 1
        m = mask
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            deg = sum(1 for u in adj[v] if mask >> u & 1)
            if deg < best_deg:
                best, best_deg = v, deg
                if deg == 0:
                    break
        total = 0
        if best_deg:
            rest = mask & ~(1 << best)
            for u, w in adj[best].items():
                if rest >> u & 1:
                    total += w * go(rest & ~(1 << u))
        memo[mask] = total
        return total

    return factor * go(start)


def count_perfect_matchings_bitmask(
    G: Multigraph,
    forbidden: Iterable[tuple[int, int]] = (),
    must_cover: Iterable[tuple[int, int]] = (),
    multiplicity: bool = True,
) -> int:
    """Independent oracle: DP that always matches the lowest remaining vertex."""
    n = G.n
    if n % 2:
        return 0
    weights = _matching_weights(G, forbidden, multiplicity)
    factor, used = _apply_must_cover(n, weights, must_cover)
    if factor == 0:
        return 0
    W = [[0] * n for _ in range(n)]
    for (u, v), w in weights.items():
        W[u - 1][v - 1] = W[v - 1][u - 1] = w
    full = sum(1 << v for v in range(n) if v + 1 not in used)

    @lru_cache(maxsize=None)
    def f(mask: int) -> int:
        if mask == 0:
            return 1
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        total = 0
        m = rest
        while m:
            low = m & -m
            j = low.bit_length() - 1
            m ^= low
            if W[i][j]:
                total += W[i][j] * f(rest ^ low)
        return total

    return factor * f(full)


def enumerate_perfect_matchings(G: Multigraph, limit: int | None = None) -> list[tuple[tuple[int, int], ...]]:
    """All perfect matchings of the simple support of ``G`` (loops ignored)."""
    n = G.n
    if n % 2:
        return []
    adj = [set() for _ in range(n + 1)]
    for u, v in G.pairs:
        if u != v:
            adj[u].add(int(v))
            adj[v].add(int(u))
    out: list[tuple[tuple[int, int], ...]] = []
    free = set(range(1, n + 1))
    chosen: list[tuple[int, int]] = []

    def go() -> bool:
        if not free:
            out.append(tuple(sorted(chosen)))
            return limit is not None and len(out) >= limit
        v = min(free)
        free.discard(v)
        for u in sorted(adj[v] & free):
            free.discard(u)
            chosen.append((v, u))
            stop = go()
            chosen.pop()
            free.add(u)
            if stop:
                free.add(v)
                return True
        free.add(v)
        return False

    go()
    return out


def all_perfect_matchings(n: int) -> list[tuple[tuple[int, int], ...]]:
    """Every perfect matching of ``[n]`` as a sorted tuple of pairs."""
    from ..graphs import complete_graph

    return enumerate_perfect_matchings(complete_graph(n))


# -- pairs of perfect matchings -------------------------------------------


def matching_pair_count_formula(n: int, k: int) -> float:
    """Asymptotic main term ``n! / (2^k k! sqrt(pi (n - 2k) / 2))``."""
    from math import lgamma, log, pi, exp

    if not 0 <= k <= n // 2 - 2:
        raise ValueError("formula needs 0 <= k <= n/2 - 2")
    return exp(lgamma(n + 1) - k * log(2) - lgamma(k + 1) - 0.5 * log(pi * (n - 2 * k) / 2))


def _avoiding_matchings(m: int) -> int:
    """Perfect matchings of ``2m`` points sharing no pair with a fixed one."""
    return sum((-1) ** j * comb(m, j) * double_factorial(2 * m - 2 * j - 1) for j in range(m + 1))


def matching_pair_count(n: int, k: int, mode: str = "exact", level: str = "vertex", max_n: int = 12) -> int | float:
    """Ordered pairs ``(H1, H2)`` of perfect matchings of ``[n]`` sharing ``k`` edges.

    ``level="vertex"`` counts plain pairs with ``|H1 & H2| = k`` (brute force
    over ``H2`` for a fixed ``H1``; the count does not depend on ``H1``).
    ``level="pairing"`` counts the configurations of the pairing model, in
    which two parallel pairs with the same ends are distinct: every common
    edge may be either a shared pair or a 2-cycle, giving
    ``sum_{H1, H2} C(|H1 & H2|, k)``.  ``mode="formula"`` returns the
    asymptotic main term, which approximates the pairing-level count.
    """
    if n % 2 or n < 2:
        raise ValueError("n must be even and >= 2")
    if not 0 <= k <= n // 2:
        raise ValueError(f"k = {k} outside [0, n/2]")
    if mode == "formula":
        return matching_pair_count_formula(n, k)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if n > max_n:
        raise InstanceTooLarge(f"exact pair count limited to n <= {max_n}")
    if level not in ("vertex", "pairing"):
        raise ValueError(f"unknown level {level!r}")
    ms = all_perfect_matchings(n)
    h1 = set(ms[0])
    total = 0
    for h2 in ms:
        c = len(h1.intersection(h2))
        total += (c == k) if level == "vertex" else comb(c, k)
    return len(ms) * total


def matching_pair_count_closed(n: int, k: int, level: str = "vertex") -> int:
    """Closed forms for :func:`matching_pair_count` (inclusion-exclusion / cycle EGF)."""
    h = n // 2
    if level == "vertex":
        return double_factorial(n - 1) * comb(h, k) * _avoiding_matchings(h - k)
    return comb(n, 2 * k) * double_factorial(2 * k - 1) * double_factorial(n - 2 * k - 1) ** 2


# -- pairing-space cardinalities ------------------------------------------


def num_pairings(n: int, d: int) -> int:
    """``(dn - 1)!!``."""
    if (n * d) % 2:
        return 0
    return double_factorial(n * d - 1)


def num_loopless_pairings(n: int, d: int) -> int:
    """Pairings of ``n`` bins of ``d`` points with no pair inside a bin (inclusion-exclusion)."""
    if (n * d) % 2:
        return 0
    # per bin: ways to pick j disjoint in-bin pairs
    per_bin = [comb(d, 2 * j) * double_factorial(2 * j - 1) for j in range(d // 2 + 1)]
    poly = [1]
    for _ in range(n):
        new = [0] * (len(poly) + len(per_bin) - 1)
        for a, x in enumerate(poly):
            if x:
                for b, y in enumerate(per_bin):
                    new[a + b] += x * y
        poly = new
    return sum((-1) ** j * c * double_factorial(n * d - 2 * j - 1) for j, c in enumerate(poly))


def pairings_of_multigraph(G: Multigraph, d: int) -> int:
    """Number of pairings on bins of size ``d`` projecting onto ``G``."""
    if np.any(G.degrees() != d):
        return 0
    num = factorial(d) ** G.n
    den = 1
    for (u, v), m in G.edges.items():
        den *= factorial(m) * (2**m if u == v else 1)
    return num // den


def expected_loopless_matching_count(n: int, d: int) -> Fraction:
    """Expected number of perfect matchings (pairing level) in the loopless pairing model.

    Sum over perfect matchings ``H`` of ``[n]`` and point choices of the
    probability that those ``n/2`` pairs are all present:
    ``(n-1)!! d^n L(n, d-1) / L(n, d)`` with ``L`` the loopless pairing count.
    """
    if n % 2:
        return Fraction(0)
    return Fraction(double_factorial(n - 1) * d**n * num_loopless_pairings(n, d - 1), num_loopless_pairings(n, d))

