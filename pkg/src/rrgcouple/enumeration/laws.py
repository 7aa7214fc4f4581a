"""Exact laws of the multigraph models on tiny instances (rational arithmetic)."""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import product

from ..distributions import FiniteDistribution
from ..graphs import Multigraph
from .counting import (
    all_perfect_matchings,
    double_factorial,
    enumerate_simple_graphs,
    num_loopless_pairings,
    num_pairings,
    pairings_of_multigraph,
)

DEFAULT_CAP = 10**7


class SpaceTooLarge(ValueError):
    """The underlying labeled space exceeds the enumeration cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: labeled space has {size} elements, above the cap {cap}")
        self.size = size
        self.cap = cap


def regular_multigraphs(n: int, d: int, loops: bool = True) -> list[Multigraph]:
    """Every ``d``-regular multigraph on ``[n]`` (loops add 2 to the degree)."""
    out: list[Multigraph] = []
    res = [d] * n
    edges: dict[tuple[int, int], int] = {}

    def spread(i: int, j: int, left: int) -> None:
        # distribute ``left`` edges from i over the vertices j, j+1, ...
        if left == 0:
            go(i + 1)
            return
        if j >= n:
            return
        if sum(res[j:]) < left:
            return
        for m in range(min(left, res[j]), -1, -1):
            if m:
                res[j] -= m
                edges[(i + 1, j + 1)] = m
            spread(i, j + 1, left - m)
            if m:
                res[j] += m
                del edges[(i + 1, j + 1)]

    def go(i: int) -> None:
        if i == n:
            out.append(Multigraph(n, dict(edges)))
            return
        r = res[i]
        res[i] = 0
        for lp in range(r // 2 if loops else 0, -1, -1):
            if lp:
                edges[(i + 1, i + 1)] = lp
            spread(i, i + 1, r - 2 * lp)
            if lp:
                del edges[(i + 1, i + 1)]
        res[i] = r

    if (n * d) % 2 == 0:
        go(0)
    return out


def enumerate_pairings(n: int, d: int, loopless: bool = False):
    """Yield every pairing of ``n`` bins of ``d`` points as a list of point pairs."""
    N = n * d
    free = [True] * N
    pairs: list[tuple[int, int]] = []

    def go(start: int):
        a = start
        while a < N and not free[a]:
            a += 1
        if a == N:
            yield list(pairs)
            return
        free[a] = False
        for b in range(a + 1, N):
            if free[b] and not (loopless and a // d == b // d):
                free[b] = False
                pairs.append((a, b))
                yield from go(a + 1)
                pairs.pop()
                free[b] = True
        free[a] = True

    yield from go(0)


def _pairing_law(n: int, d: int, loopless: bool, method: str) -> FiniteDistribution:
    total = num_loopless_pairings(n, d) if loopless else num_pairings(n, d)
    if total == 0:
        raise ValueError(f"no {'loopless ' if loopless else ''}pairings for n={n}, d={d}")
    if method == "brute":
        counts: dict[Multigraph, int] = {}
        for pairs in enumerate_pairings(n, d, loopless):
            g = Multigraph(n, [(a // d + 1, b // d + 1) for a, b in pairs])
            counts[g] = counts.get(g, 0) + 1
    else:
        counts = {g: pairings_of_multigraph(g, d) for g in regular_multigraphs(n, d, loops=not loopless)}
    assert sum(counts.values()) == total
    return FiniteDistribution.from_weights(counts, exact=True)


def _matching_law(n: int) -> FiniteDistribution:
    return FiniteDistribution.uniform(Multigraph(n, list(m)) for m in all_perfect_matchings(n))


def convolve(a: FiniteDistribution, b: FiniteDistribution) -> FiniteDistribution:
    """Law of the superposition of independent multigraphs drawn from ``a`` and ``b``."""
    acc: dict[Multigraph, Fraction] = {}
    for (ga, pa), (gb, pb) in product(zip(a.outcomes, a.probs), zip(b.outcomes, b.probs)):
        g = ga + gb
        acc[g] = acc.get(g, 0) + pa * pb
    return FiniteDistribution.from_weights(acc, exact=a.exact and b.exact)


def _parse_model(model: str) -> tuple[str, tuple[int, ...]]:
    m = re.fullmatch(r"([a-z-]+)(?:\(([\d,\s]*)\))?", model.strip())
    if not m:
        raise ValueError(f"cannot parse model {model!r}")
    args = tuple(int(x) for x in m.group(2).split(",")) if m.group(2) else ()
    return m.group(1), args


def exact_model_distribution(
    model: str, n: int, d: int | None = None, cap: int = DEFAULT_CAP, method: str = "multigraph"
) -> FiniteDistribution:
    """Exact law over multigraphs of one of the models.

    ``model`` is ``"pairing"``, ``"loopless-pairing"``, ``"grd"``,
    ``"matching-superpose(d)"`` or ``"pairing-plus-matchings(d, j)"`` (the
    loopless pairing model ``P*(n, d)`` superposed with ``j`` independent
    uniform perfect matchings).  For the pairing models ``method="brute"``
    walks every pairing; the default groups pairings by their projection and
    weights each multigraph by its number of preimages.
    """
    name, args = _parse_model(model)
    if name in ("pairing", "loopless-pairing", "grd"):
        if d is None:
            raise ValueError(f"{name} needs d")
        # simple graphs are enumerated directly, so their space is the edge-subset space
        size = 2 ** (n * (n - 1) // 2) if name == "grd" else num_pairings(n, d)
        if size > cap:
            raise SpaceTooLarge(f"{name}(n={n}, d={d})", size, cap)
        if name == "grd":
            graphs = enumerate_simple_graphs([d] * n)
            if not graphs:
                raise ValueError(f"no simple {d}-regular graph on {n} vertices")
            return FiniteDistribution.uniform(graphs)
        return _pairing_law(n, d, name == "loopless-pairing", method)
    if name == "matching-superpose":
        k = args[0] if args else d
        if k is None or n % 2:
            raise ValueError("matching-superpose needs even n and a matching count")
        size = double_factorial(n - 1) ** k
        if size > cap:
            raise SpaceTooLarge(f"{model} on n={n}", size, cap)
        law = _matching_law(n)
        out = law
        for _ in range(k - 1):
            out = convolve(out, law)
        return out
    if name == "pairing-plus-matchings":
        if len(args) != 2:
            raise ValueError("pairing-plus-matchings needs (d, j)")
        dd, j = args
        size = num_pairings(n, dd) * double_factorial(n - 1) ** j
        if size > cap:
            raise SpaceTooLarge(f"{model} on n={n}", size, cap)
        out = _pairing_law(n, dd, True, method)
        law = _matching_law(n)
        for _ in range(j):
            out = convolve(out, law)
        return out
    raise ValueError(f"unknown model {model!r}")
