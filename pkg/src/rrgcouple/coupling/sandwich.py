"""End-to-end embedding G(n, d) <= G(n, p), p = x log n / n.

Even n
    ``tau`` independent O(n, 2) copies are embedded in G(n, p) through the
    d-out coupling (one O(n, 2k) split into k copies, or several layers
    whose densities multiply out to p when 2k > n - 1).  Each copy yields a
    uniform perfect matching; the matchings feed the rejection procedure
    with target G(n, d), whose output sits inside their union.  The exact
    weights exist only for tiny n; above that the inner G(n, d) is drawn
    independently and the run is marked decoupled.
Odd n (d even)
    Recurse on (n - 1, d - 1), attach vertex n to d uniform vertices, and
    complete with a perfect matching of the remaining vertices that avoids
    G_1, taken from an independent G(n - 1, q) layer when possible.  Vertex
    n's outer neighbourhood is a uniform set of Bin(n - 1, p) vertices
    containing the chosen ones, so the outer graph stays exactly G(n, p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..enumeration.counting import enumerate_perfect_matchings
from ..enumeration.laws import SpaceTooLarge
from ..graphs import Digraph, Matching, Multigraph, contains
from ..models import _bernoulli_pairs, sample_dout_digraph, sample_gnp, sample_grd, sample_perfect_matching
from ..rng import as_generator
from .dout import MIN_X, dout_gnp_embed
from .matchings import maximum_matching, random_perfect_matching_of, split_dout
from .rejection import rejection_embed, rejection_table
from .report import EmbeddingReport

MICRO_MAX_N = 8


@dataclass
class SandwichReport(EmbeddingReport):
    stages: dict[str, bool] = field(default_factory=dict)


def _fn_covering_support(n: int, d: int) -> float:
    """Smallest convenient ``fn`` with ``Omega_f`` equal to the whole G(n, d) support."""
    t = rejection_table(n, d, "grd", 1e9, "tight")
    ws = [float(w) for w in t.weights.values()]
    return float(max(max(ws), 1 / min(ws))) * (1 + 1e-9)


def micro_feasible(n: int, d: int) -> bool:
    if n > MICRO_MAX_N or n % 2:
        return False
    try:
        rejection_table(n, d, "grd", 1e9, "tight")
    except (SpaceTooLarge, ValueError):
        return False
    return True


def _embed_layers(n: int, p: float, copies: int, gen) -> tuple[Multigraph, list[Digraph], list[bool], dict]:
    """``copies`` O_vec(n, 2) graphs and an outer G(n, p) containing them when the layers couple."""
    per_layer = max(1, (n - 1) // 2)
    layers = math.ceil(copies / per_layer)
    pl = -math.expm1(math.log1p(-p) / layers) if p < 1 else 1.0
    outer_codes = []
    out: list[Digraph] = []
    coupled: list[bool] = []
    rates = {"layers": layers, "layer_p": pl, "layer_x": pl * n / math.log(n)}
    left = copies
    for _ in range(layers):
        k = min(per_layer, left)
        left -= k
        x_l = pl * n / math.log(n)
        if x_l >= MIN_X and 2 * k <= n - 1:
            rep = dout_gnp_embed(n, pl, 2 * k, gen)
            outer_l, D, ok = rep.outer, rep.inner, not rep.decoupled
        else:
            outer_l = sample_gnp(n, pl, rng=gen)
            D, ok = sample_dout_digraph(n, 2 * k, gen), False
        outer_codes.append(outer_l.pairs)
        parts = split_dout(D, k, gen) if k > 1 else [D]
        out.extend(parts)
        coupled.extend([ok] * k)
    allp = np.concatenate(outer_codes) if outer_codes else np.zeros((0, 2), np.int64)
    outer = Multigraph.from_arrays(n, allp[:, 0], allp[:, 1]).support()
    return outer, out, coupled, rates


def _even(n: int, d: int, p: float, gen, tau: int | None, fn: float | None) -> SandwichReport:
    micro = micro_feasible(n, d)
    if tau is None:
        tau = 10 * d if micro else d
    outer, copies, coupled, rates = _embed_layers(n, p, tau, gen)
    matchings: list[Matching] = []
    found = []
    for D in copies:
        m, _ = random_perfect_matching_of(D.to_undirected(), gen) if n > 2 else (Matching(2, [(1, 2)]), True)
        found.append(m is not None)
        matchings.append(m if m is not None else sample_perfect_matching(n, gen))
    union = Multigraph(n, [tuple(pr) for m in matchings for pr in m.pairs.tolist()]).support()
    stages = {
        "copies_in_outer": all(coupled),
        "matchings_found": all(found),
        "union_in_outer": contains(union, outer),
    }
    diag = dict(rates)
    diag.update({"tau": tau, "micro": micro, "copies_coupled": int(sum(coupled)), "matchings_found": int(sum(found))})
    decoupled = False
    if micro:
        fn_used = fn if fn is not None else _fn_covering_support(n, d)
        rep = rejection_embed(n, d, tau, fn_used, gen, target="grd", matchings=matchings)
        diag["fn"] = fn_used
        diag["accepted_at"] = rep.diagnostics["accepted_at"]
        if rep.inner is None:
            inner = sample_grd(n, d, gen)
            decoupled = True
            stages["inner_accepted"] = False
        else:
            inner = rep.inner
            stages["inner_accepted"] = True
        stages["inner_in_union"] = contains(inner, union)
    else:
        inner = sample_grd(n, d, gen)
        decoupled = True
        diag["fallback"] = "no exact rejection weights at this size: inner drawn independently"
        stages["inner_in_union"] = contains(inner, union)
    return SandwichReport(inner, outer, decoupled=decoupled, diagnostics=diag, stages=stages)


def _avoiding_matching(R: np.ndarray, G1: Multigraph, layer: Multigraph | None, gen
                       ) -> tuple[list[tuple[int, int]] | None, bool]:
    """Perfect matching of ``R`` avoiding ``G1``: from ``layer`` when possible.

    Returns ``(pairs, from_layer)``; ``pairs`` is ``None`` if ``K_R - G1``
    has no perfect matching at all.
    """
    r = R.size
    if r == 0:
        return [], True
    idx = {int(v): i for i, v in enumerate(R)}
    g1 = {(int(a), int(b)) for a, b in G1.pairs}

    def pm_of(pairs: list[tuple[int, int]]):
        H = Multigraph(r, [(idx[a] + 1, idx[b] + 1) for a, b in pairs])
        m, _ = random_perfect_matching_of(H, gen)
        if m is None:
            return None
        return [(int(R[a - 1]), int(R[b - 1])) for a, b in m.pairs.tolist()]

    if layer is not None:
        cand = [(int(a), int(b)) for a, b in layer.pairs if int(a) in idx and int(b) in idx and (int(a), int(b)) not in g1]
        m = pm_of(cand)
        if m is not None:
            return m, True
    full = [(int(a), int(b)) for i, a in enumerate(R) for b in R[i + 1:] if (int(a), int(b)) not in g1]
    return pm_of(full), False


def _odd(n: int, d: int, p: float, x: float, gen, tau: int | None, fn: float | None) -> SandwichReport:
    if d % 2:
        raise ValueError("odd n needs even d")
    eps = max(x - 1.0, 1e-3)
    q = min((1 + eps / 3) * math.log(n) / n, p)
    p_inner = 1.0 - (1.0 - p) / (1.0 - q) if q < 1 else 1.0
    sub = _run(n - 1, d - 1, p_inner, gen, tau, fn)
    G1, G2 = sub.inner, sub.outer

    # step (ii): x_1..x_d and the completing matching; redraw x when impossible
    for attempt in range(1, 10**4 + 1):
        xs = np.sort(gen.choice(np.arange(1, n), size=d, replace=False))
        R = np.setdiff1d(np.arange(1, n), xs)
        layer_R = None
        if R.size:
            u, v = _bernoulli_pairs(gen, R.size, q, directed=False)
            layer_R = Multigraph.from_arrays(n, R[u - 1], R[v - 1]) if u.size else Multigraph(n)
        M, from_layer = _avoiding_matching(R, G1, layer_R, gen)
        if M is not None:
            break
    else:
        raise RuntimeError("no completing matching found")

    # the rest of G' so that it is G(n - 1, q) on [n - 1]
    u, v = _bernoulli_pairs(gen, n - 1, q, directed=False)
    inR = np.zeros(n + 1, dtype=bool)
    inR[R] = True
    keep = ~(inR[u] & inR[v])
    Gp_rest = (u[keep], v[keep])

    # vertex n: a uniform Bin(n - 1, p) neighbourhood containing the x's when possible
    D = int(gen.binomial(n - 1, p))
    if D >= d:
        others = gen.choice(R, size=D - d, replace=False) if D > d else np.zeros(0, np.int64)
        nbrs = np.concatenate([xs, others])
    else:
        nbrs = gen.choice(xs, size=D, replace=False)

    parts_u = [G2.pairs[:, 0], Gp_rest[0], np.full(nbrs.size, n)]
    parts_v = [G2.pairs[:, 1], Gp_rest[1], nbrs]
    if layer_R is not None and layer_R.num_pairs:
        parts_u.append(layer_R.pairs[:, 0])
        parts_v.append(layer_R.pairs[:, 1])
    outer = Multigraph.from_arrays(n, np.concatenate(parts_u), np.concatenate(parts_v)).support()
    G1n = Multigraph.from_arrays(n, G1.pairs[:, 0], G1.pairs[:, 1])
    star = Multigraph(n, [(int(a), n) for a in xs])
    Mg = Multigraph(n, M)
    inner = G1n + star + Mg
    stages = {f"sub:{k}": v for k, v in sub.stages.items()}
    stages.update({
        "sub_contained": sub.contained,
        "vertex_n_degree_ok": D >= d,
        "matching_in_layer": from_layer,
    })
    diag = {"sub": sub.diagnostics, "q": q, "p_inner": p_inner, "x_redraws": attempt - 1, "D": D}
    return SandwichReport(inner, outer, decoupled=sub.decoupled, diagnostics=diag, stages=stages)


def _run(n: int, d: int, p: float, gen, tau, fn) -> SandwichReport:
    x = p * n / math.log(n) if n > 1 else math.inf
    if n % 2 == 0:
        return _even(n, d, p, gen, tau, fn)
    return _odd(n, d, p, x, gen, tau, fn)


def sandwich_run(n: int, d: int, x: float, rng=None, tau: int | None = None, fn: float | None = None
                 ) -> SandwichReport:
    """One coupled draw of ``(G(n, d), G(n, p))`` with ``p = x log n / n``.

    ``stages`` records each link of the chain; ``contained`` is the overall
    containment of the inner graph in the outer one.
    """
    if n < 2 or not 1 <= d < n:
        raise ValueError("need n >= 2 and 1 <= d < n")
    if (n * d) % 2:
        raise ValueError("d*n must be even")
    p = x * math.log(n) / n
    if not 0 < p <= 1:
        raise ValueError(f"p = x log n / n = {p:.4g} outside (0, 1]")
    gen = as_generator(rng)
    return _run(n, d, p, gen, tau, fn)
