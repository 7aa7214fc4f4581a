"""Perfect matchings extracted from independent 2-out graphs.

Maximum matching uses Edmonds' augmenting paths with blossom contraction,
started from a greedy (Karp-Sipser style) matching so that only a handful of
searches are needed on sparse random graphs.  Vertices are relabelled by a
uniform random permutation before the search; since O(n, 2) is exchangeable,
the returned matching is then a uniform perfect matching of K_n whenever one
exists, even though the choice within a given copy is not uniform.  For
n <= 16 the choice within the copy is made uniform by enumeration.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..enumeration.counting import enumerate_perfect_matchings
from ..graphs import Digraph, Matching, Multigraph
from ..models import sample_dout_digraph
from ..rng import as_generator

EXACT_CHOICE_MAX_N = 16


def _greedy(adj: list[list[int]], n: int) -> list[int]:
    """Degree-1 first greedy matching (0-based, -1 = unmatched)."""
    match = [-1] * n
    deg = [len(a) for a in adj]
    ones = deque(v for v in range(n) if deg[v] == 1)
    alive = [True] * n

    def take(u: int, v: int) -> None:
        match[u], match[v] = v, u
        for w in (u, v):
            alive[w] = False
            for z in adj[w]:
                if alive[z]:
                    deg[z] -= 1
                    if deg[z] == 1:
                        ones.append(z)

    order = iter(range(n))
    while True:
        while ones:
            v = ones.popleft()
            if not alive[v] or deg[v] != 1:
                continue
            u = next(z for z in adj[v] if alive[z])
            take(v, u)
        v = next(order, None)
        if v is None:
            break
        if alive[v]:
            nb = [z for z in adj[v] if alive[z]]
            if nb:
                take(v, nb[0])
            else:
                alive[v] = False
    return match


def maximum_matching(n: int, edges: np.ndarray | list[tuple[int, int]]) -> list[int]:
    """Maximum matching of a simple graph on ``0..n-1``; returns the mate array."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        u, v = int(u), int(v)
        if u != v:
            adj[u].append(v)
            adj[v].append(u)
    match = _greedy(adj, n)
    base = list(range(n))
    parent = [-1] * n

    def lca(a: int, b: int) -> int:
        seen = set()
        while True:
            a = base[a]
            seen.add(a)
            if match[a] == -1:
                break
            a = parent[match[a]]
        while True:
            b = base[b]
            if b in seen:
                return b
            b = parent[match[b]]

    def find_path(root: int) -> int:
        nonlocal base
        used = {root}
        for i in touched:
            base[i] = i
            parent[i] = -1
        touched.clear()
        touched.add(root)
        q = deque([root])
        while q:
            v = q.popleft()
            for to in adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] != -1 and parent[match[to]] != -1):
                    cur = lca(v, to)
                    blossom: set[int] = set()
                    mark_path(v, cur, to, blossom)
                    mark_path(to, cur, v, blossom)
                    # relabel every vertex whose base lies in the blossom
                    for i in list(touched):
                        if base[i] in blossom:
                            base[i] = cur
                            if i not in used:
                                used.add(i)
                                q.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    touched.add(to)
                    if match[to] == -1:
                        return to
                    w = match[to]
                    touched.add(w)
                    used.add(w)
                    q.append(w)
        return -1

    def mark_path(v: int, b: int, child: int, blossom: set[int]) -> None:
        while base[v] != b:
            blossom.add(base[v])
            blossom.add(base[match[v]])
            parent[v] = child
            touched.add(v)
            child = match[v]
            v = parent[match[v]]

    touched: set[int] = set()
    for root in range(n):
        if match[root] != -1 or not adj[root]:
            continue
        end = find_path(root)
        while end != -1:
            pv = parent[end]
            ppv = match[pv]
            match[end], match[pv] = pv, end
            end = ppv
    return match


@dataclass(frozen=True)
class CopyResult:
    copy: Digraph
    matching: Matching | None
    uniform_choice: bool


def random_perfect_matching_of(G: Multigraph, rng=None, exact_max_n: int = EXACT_CHOICE_MAX_N
                               ) -> tuple[Matching | None, bool]:
    """A perfect matching of ``G`` (or ``None``) and whether the choice is uniform within ``G``."""
    gen = as_generator(rng)
    n = G.n
    if n % 2:
        return None, False
    if n <= exact_max_n:
        all_pm = enumerate_perfect_matchings(G)
        if not all_pm:
            return None, True
        return Matching(n, all_pm[int(gen.integers(len(all_pm)))]), True
    perm = gen.permutation(n)  # label v -> perm[v - 1]
    inv = np.argsort(perm)
    pairs = np.sort(perm[G.pairs[G.pairs[:, 0] != G.pairs[:, 1]] - 1], axis=1)
    # canonical edge order: the search must see only the relabelled graph,
    # not the original labels through the order of the edge list
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    mate = maximum_matching(n, pairs)
    if any(m == -1 for m in mate):
        return None, False
    out = [(int(inv[a]) + 1, int(inv[b]) + 1) for a, b in enumerate(mate) if a < b]
    return Matching(n, out), False


def split_dout(D: Digraph, k: int, rng=None) -> list[Digraph]:
    """Split ``O_vec(n, 2k)`` into ``k`` copies of ``O_vec(n, 2)`` whose union lies inside it.

    For each vertex, ``k`` independent uniform 2-subsets of abstract labels are
    drawn and the union of labels is mapped injectively onto a uniform part
    of the vertex's out-neighbourhood.  The copies are then exactly i.i.d.
    O_vec(n, 2), whatever the law of the out-neighbourhoods.
    """
    gen = as_generator(rng)
    n = D.n
    outdeg = D.out_degrees()
    if np.any(outdeg != 2 * k):
        raise ValueError(f"every out-degree must equal {2 * k}")
    pool = n - 1
    arcs = [[] for _ in range(k)]
    for v in range(1, n + 1):
        nb = D.out_neighbors(v)
        picks = [gen.choice(pool, size=2, replace=False) for _ in range(k)]
        labels = np.unique(np.concatenate(picks))
        image = gen.choice(nb, size=labels.size, replace=False)
        where = {int(a): int(b) for a, b in zip(labels, image)}
        for c in range(k):
            for a in picks[c]:
                arcs[c].append((v, where[int(a)]))
    return [Digraph(n, a) for a in arcs]


def matchings_via_2out(n: int, count: int, rng=None, copies: list[Digraph] | None = None) -> list[CopyResult]:
    """One perfect matching (or ``None``) from each of ``count`` independent O(n, 2) copies."""
    if n % 2 or n < 2:
        raise ValueError("n must be even and >= 2")
    gen = as_generator(rng)
    out = []
    for c in range(count):
        if copies is not None:
            D = copies[c]
        elif n == 2:
            D = Digraph(2, [(1, 2), (2, 1)])
        else:
            D = sample_dout_digraph(n, 2, gen)
        m, uniform = random_perfect_matching_of(D.to_undirected(), gen)
        out.append(CopyResult(D, m, uniform))
    return out
