"""Labeled graph containers shared by every model.

Vertices are 1-indexed.  An undirected pair is stored as ``(u, v)`` with
``u <= v``; ``(v, v)`` is a loop and adds 2 to the degree of ``v``.

All containers are immutable and keep their data in sorted numpy arrays, so
that graphs with ~10^6 edges (desk-scale ``G(n, p)`` at ``n = 10^5``) stay
cheap, while tiny graphs are still hashable and usable as distribution keys.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np


def _codes(u: np.ndarray, v: np.ndarray, n: int) -> np.ndarray:
    return u.astype(np.int64) * (n + 1) + v.astype(np.int64)


class Multigraph:
    """Vertex-labeled multigraph on ``[n]`` with loop and edge multiplicities."""

    __slots__ = ("n", "pairs", "mult", "_codes", "_hash")

    def __init__(self, n: int, edges: Mapping[tuple[int, int], int] | Iterable[tuple[int, int]] = ()):
        if isinstance(edges, Mapping):
            items = [(min(u, v), max(u, v), m) for (u, v), m in edges.items() if m != 0]
            if items:
                arr = np.array(items, dtype=np.int64)
                u, v, m = arr[:, 0], arr[:, 1], arr[:, 2]
            else:
                u = v = m = np.zeros(0, dtype=np.int64)
            self._build(n, u, v, m)
        else:
            arr = np.array(list(edges), dtype=np.int64).reshape(-1, 2)
            self._build(n, arr[:, 0], arr[:, 1], None)

    @classmethod
    def from_arrays(cls, n: int, u, v, mult=None) -> Multigraph:
        """Build from endpoint arrays; repeated pairs accumulate multiplicity."""
        g = cls.__new__(cls)
        g._build(n, np.asarray(u, dtype=np.int64), np.asarray(v, dtype=np.int64),
                 None if mult is None else np.asarray(mult, dtype=np.int64))
        return g

    def _build(self, n: int, u: np.ndarray, v: np.ndarray, mult: np.ndarray | None) -> None:
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        if lo.size and (lo.min() < 1 or hi.max() > n):
            raise ValueError(f"vertex index outside [1, {n}]")
        if mult is not None and mult.size and mult.min() < 1:
            raise ValueError("multiplicities must be >= 1")
        codes = _codes(lo, hi, n)
        weights = np.ones_like(codes) if mult is None else mult
        uniq, inv = np.unique(codes, return_inverse=True)
        m = np.bincount(inv.ravel(), weights=weights, minlength=uniq.size).astype(np.int64)
        self.n = int(n)
        self._codes = uniq
        self.pairs = np.stack([uniq // (n + 1), uniq % (n + 1)], axis=1) if uniq.size else np.zeros((0, 2), np.int64)
        self.mult = m
        self.pairs.setflags(write=False)
        self.mult.setflags(write=False)
        self._codes.setflags(write=False)
        self._hash = None

    # -- basic queries -------------------------------------------------

    @property
    def edges(self) -> dict[tuple[int, int], int]:
        return {(int(a), int(b)): int(m) for (a, b), m in zip(self.pairs, self.mult)}

    @property
    def num_pairs(self) -> int:
        """Number of distinct vertex pairs carrying at least one edge."""
        return int(self._codes.size)

    @property
    def num_edges(self) -> int:
        """Number of edges counted with multiplicity."""
        return int(self.mult.sum())

    def multiplicity(self, u: int, v: int) -> int:
        code = _codes(np.array([min(u, v)]), np.array([max(u, v)]), self.n)[0]
        i = np.searchsorted(self._codes, code)
        if i < self._codes.size and self._codes[i] == code:
            return int(self.mult[i])
        return 0

    def degrees(self) -> np.ndarray:
        """Degree array, entry ``i`` is the degree of vertex ``i + 1``; loops count twice."""
        deg = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(deg, self.pairs[:, 0], self.mult)
        np.add.at(deg, self.pairs[:, 1], self.mult)
        return deg[1:]

    def degree(self, v: int) -> int:
        return int(self.degrees()[v - 1])

    def is_simple(self) -> bool:
        return bool(np.all(self.mult == 1) and np.all(self.pairs[:, 0] != self.pairs[:, 1]))

    def key(self) -> tuple[tuple[int, int, int], ...]:
        """Canonical key: sorted ``(u, v, mult)`` triples."""
        return tuple((int(a), int(b), int(m)) for (a, b), m in zip(self.pairs, self.mult))

    def codes(self) -> np.ndarray:
        return self._codes

    # -- algebra -------------------------------------------------------

    def __add__(self, other: Multigraph) -> Multigraph:
        """Superposition: multiplicities add."""
        self._check_same_n(other)
        return Multigraph.from_arrays(
            self.n,
            np.concatenate([self.pairs[:, 0], other.pairs[:, 0]]),
            np.concatenate([self.pairs[:, 1], other.pairs[:, 1]]),
            np.concatenate([self.mult, other.mult]),
        )

    def __or__(self, other: Multigraph) -> Multigraph:
        """Union of supports; the result is simple apart from loops."""
        return (self + other).support()

    def support(self) -> Multigraph:
        """Same pairs with every multiplicity replaced by 1."""
        return Multigraph.from_arrays(self.n, self.pairs[:, 0], self.pairs[:, 1])

    def without_loops(self) -> Multigraph:
        keep = self.pairs[:, 0] != self.pairs[:, 1]
        return Multigraph.from_arrays(self.n, self.pairs[keep, 0], self.pairs[keep, 1], self.mult[keep])

    def relabel(self, perm) -> Multigraph:
        """Apply a vertex relabeling; ``perm[i - 1]`` is the new label of ``i``."""
        perm = np.asarray(perm, dtype=np.int64)
        return Multigraph.from_arrays(self.n, perm[self.pairs[:, 0] - 1], perm[self.pairs[:, 1] - 1], self.mult)

    def _check_same_n(self, other: Multigraph) -> None:
        if self.n != other.n:
            raise ValueError(f"vertex count mismatch: {self.n} != {other.n}")

    # -- dunder --------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multigraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self._codes, other._codes)
            and np.array_equal(self.mult, other.mult)
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self._codes.tobytes(), self.mult.tobytes()))
        return self._hash

    def __lt__(self, other: Multigraph) -> bool:
        return (self.n, self.key()) < (other.n, other.key())

    def __repr__(self) -> str:
        if self.num_pairs <= 12:
            body = ", ".join(f"{u}-{v}" + (f"x{m}" if m > 1 else "") for u, v, m in self.key())
            return f"Multigraph(n={self.n}, {{{body}}})"
        return f"Multigraph(n={self.n}, pairs={self.num_pairs}, edges={self.num_edges})"


def contains(sub: Multigraph, sup: Multigraph, mode: str = "simple-subgraph") -> bool:
    """Containment predicate used by every coupling report.

    ``simple-subgraph`` ignores multiplicities; ``sub-multigraph`` requires
    every multiplicity of ``sub`` to be at most the one in ``sup``.
    """
    if sub.n != sup.n:
        raise ValueError(f"vertex count mismatch: {sub.n} != {sup.n}")
    codes_sup = sup.codes()
    idx = np.searchsorted(codes_sup, sub.codes())
    idx_c = np.minimum(idx, max(codes_sup.size - 1, 0))
    if codes_sup.size == 0:
        return sub.num_pairs == 0
    present = codes_sup[idx_c] == sub.codes()
    if mode == "simple-subgraph":
        return bool(present.all())
    if mode == "sub-multigraph":
        return bool(present.all() and np.all(sup.mult[idx_c] >= sub.mult))
    raise ValueError(f"unknown containment mode {mode!r}")


class Matching:
    """Perfect matching of ``[n]`` (n even)."""

    __slots__ = ("n", "pairs")

    def __init__(self, n: int, pairs: Iterable[tuple[int, int]]):
        arr = np.array([sorted(p) for p in pairs], dtype=np.int64).reshape(-1, 2)
        if n % 2:
            raise ValueError("perfect matchings need an even vertex count")
        order = np.argsort(arr[:, 0], kind="stable")
        arr = arr[order]
        covered = np.sort(arr.ravel())
        if covered.size != n or not np.array_equal(covered, np.arange(1, n + 1)):
            raise ValueError("pairs must cover every vertex exactly once")
        self.n = n
        self.pairs = arr
        self.pairs.setflags(write=False)

    @classmethod
    def from_partner(cls, partner: np.ndarray) -> Matching:
        """From a 0-based partner array (``partner[i]`` matched to ``i``)."""
        partner = np.asarray(partner)
        idx = np.arange(partner.size)
        keep = idx < partner
        return cls(partner.size, zip(idx[keep] + 1, partner[keep] + 1))

    def to_multigraph(self) -> Multigraph:
        return Multigraph.from_arrays(self.n, self.pairs[:, 0], self.pairs[:, 1])

    def key(self) -> tuple[tuple[int, int], ...]:
        return tuple((int(a), int(b)) for a, b in self.pairs)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Matching) and self.n == other.n and np.array_equal(self.pairs, other.pairs)

    def __hash__(self) -> int:
        return hash((self.n, self.pairs.tobytes()))

    def __repr__(self) -> str:
        return f"Matching(n={self.n}, {self.key() if self.n <= 16 else '...'})"


class Digraph:
    """Simple directed graph on ``[n]``: no self-arcs, no repeated arcs."""

    __slots__ = ("n", "arcs")

    def __init__(self, n: int, arcs: Iterable[tuple[int, int]] | np.ndarray = ()):
        arr = np.asarray(arcs if isinstance(arcs, np.ndarray) else list(arcs), dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 1 or arr.max() > n):
            raise ValueError(f"vertex index outside [1, {n}]")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise ValueError("self-arcs are not allowed")
        codes = np.unique(arr[:, 0] * (n + 1) + arr[:, 1])
        self.n = n
        self.arcs = np.stack([codes // (n + 1), codes % (n + 1)], axis=1) if codes.size else np.zeros((0, 2), np.int64)
        self.arcs.setflags(write=False)

    @property
    def num_arcs(self) -> int:
        return int(self.arcs.shape[0])

    def out_degrees(self) -> np.ndarray:
        return np.bincount(self.arcs[:, 0], minlength=self.n + 1)[1:]

    def out_neighbors(self, v: int) -> np.ndarray:
        lo, hi = np.searchsorted(self.arcs[:, 0], [v, v + 1])
        return self.arcs[lo:hi, 1]

    def has_arc(self, u: int, v: int) -> bool:
        return bool(np.any(self.out_neighbors(u) == v))

    def to_undirected(self) -> Multigraph:
        """Drop orientations; antiparallel arcs collapse to one simple edge."""
        return Multigraph.from_arrays(self.n, self.arcs[:, 0], self.arcs[:, 1]).support()

    def contains(self, other: Digraph) -> bool:
        mine = self.arcs[:, 0] * (self.n + 1) + self.arcs[:, 1]
        theirs = other.arcs[:, 0] * (other.n + 1) + other.arcs[:, 1]
        return bool(np.isin(theirs, mine).all())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Digraph) and self.n == other.n and np.array_equal(self.arcs, other.arcs)

    def __hash__(self) -> int:
        return hash((self.n, self.arcs.tobytes()))

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, arcs={self.num_arcs})"


class Pairing:
    """Perfect matching on the ``d*n`` points ``(vertex, slot)``.

    Internally point ``(v, s)`` has id ``(v - 1) * d + (s - 1)``; ``points`` is
    a ``(dn/2, 2)`` array of ids with each row increasing and rows sorted.
    """

    __slots__ = ("n", "d", "points")

    def __init__(self, n: int, d: int, points: np.ndarray):
        pts = np.sort(np.asarray(points, dtype=np.int64).reshape(-1, 2), axis=1)
        if (n * d) % 2:
            raise ValueError("d*n must be even")
        if pts.shape[0] != n * d // 2 or not np.array_equal(np.sort(pts.ravel()), np.arange(n * d)):
            raise ValueError("every point must appear in exactly one pair")
        self.n, self.d = n, d
        self.points = pts[np.argsort(pts[:, 0], kind="stable")]
        self.points.setflags(write=False)

    @classmethod
    def from_tuples(cls, n: int, d: int, pairs: Iterable[tuple[int, int, int, int]]) -> Pairing:
        """From ``(u, su, v, sv)`` rows, 1-based vertices and slots."""
        rows = [((u - 1) * d + su - 1, (v - 1) * d + sv - 1) for u, su, v, sv in pairs]
        return cls(n, d, np.array(rows, dtype=np.int64).reshape(-1, 2))

    def as_tuples(self) -> list[tuple[int, int, int, int]]:
        d = self.d
        return [(int(a // d + 1), int(a % d + 1), int(b // d + 1), int(b % d + 1)) for a, b in self.points]

    def project(self) -> Multigraph:
        """Contract every bin to a vertex: the multigraph ``G[P]``."""
        return Multigraph.from_arrays(self.n, self.points[:, 0] // self.d + 1, self.points[:, 1] // self.d + 1)

    def has_loop(self) -> bool:
        return bool(np.any(self.points[:, 0] // self.d == self.points[:, 1] // self.d))

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Pairing) and (self.n, self.d) == (other.n, other.d)
                and np.array_equal(self.points, other.points))

    def __hash__(self) -> int:
        return hash((self.n, self.d, self.points.tobytes()))

    def __repr__(self) -> str:
        return f"Pairing(n={self.n}, d={self.d})"


def project_pairing(P: Pairing) -> Multigraph:
    return P.project()


def complete_graph(n: int) -> Multigraph:
    iu, iv = np.triu_indices(n, k=1)
    return Multigraph.from_arrays(n, iu + 1, iv + 1)


def cycle_graph(n: int) -> Multigraph:
    u = np.arange(1, n + 1)
    return Multigraph.from_arrays(n, u, u % n + 1)


def petersen_graph() -> Multigraph:
    outer = [(i, i % 5 + 1) for i in range(1, 6)]
    spokes = [(i, i + 5) for i in range(1, 6)]
    inner = [(i + 5, (i + 1) % 5 + 6) for i in range(1, 6)]
    return Multigraph(10, outer + spokes + inner)
