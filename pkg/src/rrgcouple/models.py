"""Exact samplers for the random (multi)graph models.

Every conditioned model is produced by whole-object rejection: the
unconditioned object is resampled from scratch until the condition holds.
``max_tries`` bounds the loop and turns non-termination into
:class:`RejectionCapExceeded`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Digraph, Matching, Multigraph, Pairing
from .rng import as_generator

DEFAULT_MAX_TRIES = 10**6


class RejectionCapExceeded(RuntimeError):
    """Raised when a rejection sampler used up its attempt budget."""

    def __init__(self, what: str, tries: int):
        super().__init__(f"{what}: no acceptable sample after {tries} attempts")
        self.what = what
        self.tries = tries


# -- helpers -------------------------------------------------------------


def random_subsets(gen: np.random.Generator, rows: int, pool: int, k: int) -> np.ndarray:
    """``rows`` independent uniform ``k``-subsets of ``range(pool)``, one per row."""
    if k > pool:
        raise ValueError(f"cannot pick {k} distinct items out of {pool}")
    if k == 0 or rows == 0:
        return np.zeros((rows, k), dtype=np.int64)
    if 4 * k >= pool:
        return np.argsort(gen.random((rows, pool)), axis=1)[:, :k].astype(np.int64)
    out = gen.integers(0, pool, size=(rows, k))
    while True:
        s = np.sort(out, axis=1)
        bad = np.flatnonzero(np.any(s[:, 1:] == s[:, :-1], axis=1))
        if bad.size == 0:
            return out
        out[bad] = gen.integers(0, pool, size=(bad.size, k))


def _pair_index_undirected(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Decode row-major indices of the pairs ``i < j`` of ``range(n)``."""
    k = k.astype(np.int64)
    total = n * (n - 1) // 2
    # row i starts at offset total - (n - i)(n - i - 1)/2
    r = np.floor((np.sqrt(8.0 * (total - k - 1) + 1.0) - 1.0) / 2.0).astype(np.int64)
    i = n - 2 - r
    start = total - (n - i) * (n - i - 1) // 2
    # guard against floating rounding at row boundaries
    low = k < start
    i[low] -= 1
    start = total - (n - i) * (n - i - 1) // 2
    high = k >= start + (n - 1 - i)
    i[high] += 1
    start = total - (n - i) * (n - i - 1) // 2
    j = k - start + i + 1
    return i, j


def _bernoulli_pairs(gen: np.random.Generator, n: int, p: float, directed: bool) -> tuple[np.ndarray, np.ndarray]:
    """Independent Bernoulli(p) selection over all pairs; 1-based endpoints."""
    total = n * (n - 1) if directed else n * (n - 1) // 2
    if total == 0 or p == 0.0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    if p == 1.0:
        idx = np.arange(total, dtype=np.int64)
    else:
        m = int(gen.binomial(total, p))
        idx = np.sort(gen.choice(total, size=m, replace=False)).astype(np.int64)
    if directed:
        u = idx // (n - 1)
        w = idx % (n - 1)
        v = w + (w >= u)
        return u + 1, v + 1
    i, j = _pair_index_undirected(idx, n)
    return i + 1, j + 1


def _check_probability(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"probability {p} outside [0, 1]")
    return p


# -- G(n, p) -------------------------------------------------------------


def sample_gnp(n: int, p: float, directed: bool = False, rng=None) -> Multigraph | Digraph:
    """Binomial random graph; ``directed=True`` gives the digraph counterpart."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = _check_probability(p)
    gen = as_generator(rng)
    u, v = _bernoulli_pairs(gen, n, p, directed)
    if directed:
        return Digraph(n, np.stack([u, v], axis=1))
    return Multigraph.from_arrays(n, u, v)


# -- matchings -----------------------------------------------------------


def _matching_arrays(gen: np.random.Generator, n: int) -> np.ndarray:
    perm = gen.permutation(n) + 1
    return perm.reshape(-1, 2)


def sample_perfect_matching(n: int, rng=None) -> Matching:
    """Uniform perfect matching on ``[n]``."""
    if n < 2 or n % 2:
        raise ValueError(f"perfect matchings need an even n >= 2, got {n}")
    pairs = _matching_arrays(as_generator(rng), n)
    return Matching(n, pairs)


def sample_matching_model(
    n: int, d: int, mode: str = "superpose", rng=None, max_tries: int = DEFAULT_MAX_TRIES
) -> Multigraph:
    """Superposition (``M_d^+``), union (``M_d^cup``) or simple-conditioned
    superposition (``M_d^oplus``) of ``d`` independent uniform perfect matchings."""
    if n < 2 or n % 2:
        raise ValueError(f"perfect matchings need an even n >= 2, got {n}")
    if d < 1:
        raise ValueError("d must be >= 1")
    if mode not in ("superpose", "union", "simple-conditioned"):
        raise ValueError(f"unknown matching-model mode {mode!r}")
    gen = as_generator(rng)
    tries = max_tries if mode == "simple-conditioned" else 1
    for _ in range(tries):
        pairs = np.concatenate([_matching_arrays(gen, n) for _ in range(d)])
        g = Multigraph.from_arrays(n, pairs[:, 0], pairs[:, 1])
        if mode == "superpose":
            return g
        if mode == "union":
            return g.support()
        if g.is_simple():
            return g
    raise RejectionCapExceeded(f"simple superposition of {d} matchings on {n} vertices", max_tries)


# -- pairing model -------------------------------------------------------


def _parse_condition(condition: str, doubles: int | None) -> tuple[str, int | None]:
    if condition.startswith("disjoint-doubles(") and condition.endswith(")"):
        return "disjoint-doubles", int(condition[len("disjoint-doubles("):-1])
    if condition == "disjoint-doubles":
        if doubles is None or doubles < 0:
            raise ValueError("disjoint-doubles needs a nonnegative double-edge count")
        return condition, doubles
    if condition in ("none", "loopless"):
        return condition, None
    raise ValueError(f"unknown pairing condition {condition!r}")


def has_disjoint_doubles(g: Multigraph, i: int) -> bool:
    """Loopless, exactly ``i`` double edges on disjoint vertex pairs, no multiplicity >= 3."""
    if np.any(g.pairs[:, 0] == g.pairs[:, 1]) or np.any(g.mult >= 3):
        return False
    dbl = g.pairs[g.mult == 2]
    if dbl.shape[0] != i:
        return False
    return np.unique(dbl.ravel()).size == 2 * i


def sample_pairing(
    n: int,
    d: int,
    condition: str = "none",
    rng=None,
    doubles: int | None = None,
    max_tries: int = DEFAULT_MAX_TRIES,
) -> Pairing:
    """Uniform pairing of ``n`` bins of ``d`` points, optionally conditioned.

    ``condition`` is ``"none"``, ``"loopless"`` (the loopless configuration
    model) or ``"disjoint-doubles"`` with ``doubles=i`` (equivalently the string
    ``"disjoint-doubles(i)"``).
    """
    if (n * d) % 2:
        raise ValueError("d*n must be even")
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    cond, i = _parse_condition(condition, doubles)
    gen = as_generator(rng)
    for _ in range(max_tries):
        pts = gen.permutation(n * d).reshape(-1, 2)
        if cond == "none":
            return Pairing(n, d, pts)
        if np.any(pts[:, 0] // d == pts[:, 1] // d):
            continue
        if cond == "loopless":
            return Pairing(n, d, pts)
        g = Multigraph.from_arrays(n, pts[:, 0] // d + 1, pts[:, 1] // d + 1)
        if has_disjoint_doubles(g, i):
            return Pairing(n, d, pts)
    raise RejectionCapExceeded(f"pairing(n={n}, d={d}) with condition {condition!r}", max_tries)


def sample_grd(n: int, d: int, rng=None, max_tries: int = DEFAULT_MAX_TRIES) -> Multigraph:
    """Uniform simple ``d``-regular graph on ``[n]`` via the pairing model."""
    if (n * d) % 2:
        raise ValueError("d*n must be even")
    if not 0 <= d < n:
        raise ValueError("need 0 <= d < n")
    gen = as_generator(rng)
    if d == 0:
        return Multigraph(n)
    for _ in range(max_tries):
        pts = gen.permutation(n * d).reshape(-1, 2)
        u, v = pts[:, 0] // d, pts[:, 1] // d
        if np.any(u == v):
            continue
        g = Multigraph.from_arrays(n, u + 1, v + 1)
        if g.num_pairs == pts.shape[0]:
            return g
    raise RejectionCapExceeded(f"simple {d}-regular graph on {n} vertices", max_tries)


# -- d-out graphs --------------------------------------------------------


def sample_dout_digraph(n: int, d: int, rng=None) -> Digraph:
    """Each vertex picks a uniform ``d``-subset of the other vertices."""
    if not 1 <= d <= n - 1:
        raise ValueError(f"need 1 <= d <= n - 1, got d={d}, n={n}")
    gen = as_generator(rng)
    w = random_subsets(gen, n, n - 1, d)
    tails = np.repeat(np.arange(n), d)
    w = w.ravel()
    heads = w + (w >= tails)
    return Digraph(n, np.stack([tails + 1, heads + 1], axis=1))


def sample_dout(n: int, d: int, keep_orientation: bool = True, rng=None) -> Digraph | Multigraph:
    """The ``d``-out random graph, oriented or with orientations dropped."""
    g = sample_dout_digraph(n, d, rng)
    return g if keep_orientation else g.to_undirected()


# -- model descriptors ------------------------------------------------------

MODEL_NAMES = (
    "pairing",
    "loopless-pairing",
    "disjoint-doubles",
    "grd",
    "gnp",
    "matching-superpose",
    "matching-union",
    "matching-simple",
    "dout",
)


@dataclass(frozen=True)
class ModelSpec:
    """A named random multigraph model with its parameters.

    ``d`` is the degree (or number of matchings, or out-degree), ``p`` the
    edge probability for ``gnp`` and ``doubles`` the double-edge count for
    ``disjoint-doubles``.
    """

    name: str
    n: int
    d: int | None = None
    p: float | None = None
    doubles: int | None = None

    def __post_init__(self):
        if self.name not in MODEL_NAMES:
            raise ValueError(f"unknown model {self.name!r}; choose from {', '.join(MODEL_NAMES)}")
        if self.name == "gnp" and self.p is None:
            raise ValueError("gnp needs p")
        if self.name != "gnp" and self.d is None:
            raise ValueError(f"{self.name} needs d")

    def sample(self, rng=None) -> Multigraph:
        gen = as_generator(rng)
        n, d = self.n, self.d
        if self.name == "pairing":
            return sample_pairing(n, d, "none", gen).project()
        if self.name == "loopless-pairing":
            return sample_pairing(n, d, "loopless", gen).project()
        if self.name == "disjoint-doubles":
            return sample_pairing(n, d, "disjoint-doubles", gen, doubles=self.doubles or 0).project()
        if self.name == "grd":
            return sample_grd(n, d, gen)
        if self.name == "gnp":
            return sample_gnp(n, self.p, rng=gen)
        if self.name == "dout":
            return sample_dout(n, d, keep_orientation=False, rng=gen)
        mode = {"matching-superpose": "superpose", "matching-union": "union", "matching-simple": "simple-conditioned"}
        return sample_matching_model(n, d, mode[self.name], gen)
