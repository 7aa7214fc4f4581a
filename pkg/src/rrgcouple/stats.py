"""Census statistics, moment predictions and empirical verification reports."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import sparse

from .coupling.thresholds import theta as theta_exponent
from .distributions import FiniteDistribution
from .enumeration.counting import all_perfect_matchings, count_perfect_matchings, expected_loopless_matching_count
from .enumeration.laws import SpaceTooLarge, exact_model_distribution
from .graphs import Multigraph
from .models import ModelSpec
from .rng import RngStream, rng_stream

# -- census ----------------------------------------------------------------


@dataclass(frozen=True)
class Census:
    loops: int  # loop edges, counted with multiplicity
    loop_vertices: int
    doubles: int  # pairs with multiplicity exactly 2
    multi: int  # pairs with multiplicity >= 2
    higher: int  # pairs with multiplicity >= 3
    triangles: int
    edges: int
    simple: bool


def count_triangles(G: Multigraph) -> int:
    """Vertex triples pairwise joined by at least one edge."""
    if G.num_pairs == 0:
        return 0
    pairs = G.pairs[G.pairs[:, 0] != G.pairs[:, 1]] - 1
    if pairs.size == 0:
        return 0
    A = sparse.coo_matrix((np.ones(pairs.shape[0]), (pairs[:, 0], pairs[:, 1])), shape=(G.n, G.n)).tocsr()
    A = A + A.T
    return int(round((A @ A).multiply(A).sum() / 6))


def count_triangles_bruteforce(G: Multigraph) -> int:
    adj = {(int(u), int(v)) for u, v in G.pairs if u != v}
    return sum(
        1 for a, b, c in combinations(range(1, G.n + 1), 3) if (a, b) in adj and (a, c) in adj and (b, c) in adj
    )


def multigraph_census(G: Multigraph) -> Census:
    loops_mask = G.pairs[:, 0] == G.pairs[:, 1]
    off = G.mult[~loops_mask]
    return Census(
        loops=int(G.mult[loops_mask].sum()),
        loop_vertices=int(loops_mask.sum()),
        doubles=int(np.sum(off == 2)),
        multi=int(np.sum(off >= 2)),
        higher=int(np.sum(off >= 3)),
        triangles=count_triangles(G),
        edges=G.num_edges,
        simple=G.is_simple(),
    )


# -- predictions -----------------------------------------------------------


@dataclass(frozen=True)
class MomentPrediction:
    """Main terms for the loopless pairing model ``P*(n, d)``.

    ``a``, ``b``, ``c`` are the coefficients of ``Y* = aX + bW + c`` divided
    by ``E Y`` (the unscaled values overflow for moderate n).
    """

    n: int
    d: int
    EX: float
    VarX: float
    EW: float
    VarW: float
    CovXW: float
    CovXY_ratio: float
    CovWY_ratio: float
    EY_logscale: float
    ratio_conc2: float
    ratio_conc1: float
    a: float
    b: float
    c: float
    theta_inputs: tuple[float, float]
    theta: float
    remainders: dict = field(default_factory=dict)


def predicted_moments(n: int, d: int, alpha: float | None = None, beta: float | None = None) -> MomentPrediction:
    """Main terms of the double-edge, triangle and perfect-matching moments.

    ``alpha``, ``beta`` feed the low-degree exponent ``theta``; by default the
    bad-vertex setting ``alpha = eps/4``, ``beta = eps^2`` with ``eps = 0.1``.
    """
    if d < 3:
        raise ValueError("predictions need d >= 3")
    EX = (d - 1) ** 2 / 4
    EW = (d - 1) ** 3 / 6
    rxy = 1 / d**2 + 2 / d**3
    rwy = -1 / d**3
    log_ey = 0.5 * math.log(2) + (d - 1) * n / 2 * math.log(d - 1) + (n - d * n / 2) * math.log(d) + 0.5
    # Cov(X, Y) = rxy EX EY and Var X = EX, so a / EY = rxy; likewise b / EY = rwy
    a = rxy
    b = rwy
    c = 1 - a * EX - b * EW
    if alpha is None or beta is None:
        eps = 0.1
        alpha, beta = eps / 4, eps**2
    return MomentPrediction(
        n=n,
        d=d,
        EX=EX,
        VarX=EX,
        EW=EW,
        VarW=EW,
        CovXW=0.0,
        CovXY_ratio=rxy,
        CovWY_ratio=rwy,
        EY_logscale=log_ey,
        ratio_conc2=1 + 1 / (4 * d**2) + 2 / (3 * d**3),
        ratio_conc1=1 + 1 / (6 * d**3),
        a=a,
        b=b,
        c=c,
        theta_inputs=(alpha, beta),
        theta=theta_exponent(alpha, beta),
        remainders={
            "moments": d**3 / n,
            "CovXW": d**6 / n,
            "cov_ratios": 1 / d**4 + d / n,
            "conc": d**-4 + d**3 / n + math.sqrt(d / n) * math.log(n) ** 3,
        },
    )


# -- empirical summaries ---------------------------------------------------


def _y_count(G: Multigraph) -> int:
    """Perfect matchings H of K_n with every pair of H present in G."""
    return count_perfect_matchings(G, multiplicity=False)


def _y_pairing(G: Multigraph) -> int:
    """Perfect matchings as sub-pairings: parallel pairs count separately."""
    return count_perfect_matchings(G, multiplicity=True)


def _y_covering(G: Multigraph) -> int:
    dbl = [tuple(map(int, pr)) for pr, m in zip(G.pairs, G.mult) if m == 2 and pr[0] != pr[1]]
    return count_perfect_matchings(G, must_cover=dbl, multiplicity=True)


STATISTICS: dict[str, Callable[[Multigraph], float]] = {
    "doubles": lambda G: multigraph_census(G).doubles,
    "multi": lambda G: multigraph_census(G).multi,
    "loops": lambda G: multigraph_census(G).loops,
    "triangles": count_triangles,
    "edges": lambda G: G.num_edges,
    "pairs": lambda G: G.num_pairs,
    "simple": lambda G: float(G.is_simple()),
    "Y": _y_count,
    "Y_pairing": _y_pairing,
    "Y_covering": _y_covering,
}


@dataclass(frozen=True)
class SampleSummary:
    names: tuple[str, ...]
    trials: int
    mean: np.ndarray
    variance: np.ndarray
    covariance: np.ndarray
    values: np.ndarray = field(repr=False)

    @property
    def se(self) -> np.ndarray:
        return np.sqrt(self.variance / self.trials)

    def stat(self, name: str) -> dict:
        i = self.names.index(name)
        return {"mean": float(self.mean[i]), "variance": float(self.variance[i]), "se": float(self.se[i])}


def _resolve_sampler(model) -> Callable:
    if isinstance(model, ModelSpec):
        return model.sample
    if callable(model):
        return model
    raise TypeError("model must be a ModelSpec or a callable taking a generator")


def _trial_values(args):
    model, names, seed, index = args
    sampler = _resolve_sampler(model)
    G = sampler(rng_stream(seed, index).generator)
    return [float(STATISTICS[s](G)) for s in names]


def collect(model, statistics: Sequence[str], trials: int, seed: int, workers: int = 1, start: int = 0) -> np.ndarray:
    """Per-trial statistic values; trial ``i`` always uses stream ``(seed, start + i)``."""
    for s in statistics:
        if s not in STATISTICS:
            raise ValueError(f"unknown statistic {s!r}; choose from {', '.join(STATISTICS)}")
    jobs = [(model, tuple(statistics), seed, start + i) for i in range(trials)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as ex:
            rows = list(ex.map(_trial_values, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        rows = [_trial_values(j) for j in jobs]
    return np.array(rows, dtype=float).reshape(trials, len(statistics))


def empirical_summary(model, statistics: Sequence[str], trials: int, rng: RngStream | int = 0, workers: int = 1
                      ) -> SampleSummary:
    """Mean, variance and covariance of named statistics over independent samples."""
    if trials < 2:
        raise ValueError("need at least 2 trials")
    seed = rng.seed if isinstance(rng, RngStream) else int(rng)
    start = rng.index * trials if isinstance(rng, RngStream) else 0
    vals = collect(model, statistics, trials, seed, workers, start)
    cov = np.atleast_2d(np.cov(vals, rowvar=False, ddof=1))
    return SampleSummary(tuple(statistics), trials, vals.mean(axis=0), np.diag(cov).copy(), cov, vals)


# -- total variation -------------------------------------------------------


@dataclass(frozen=True)
class TVResult:
    value: float | Fraction
    se: float | None = None


def _key_kind(k) -> tuple:
    return (type(k).__name__, getattr(k, "n", None))


def tv_exact(a: FiniteDistribution, b: FiniteDistribution):
    kinds = {_key_kind(k) for k in a.outcomes} | {_key_kind(k) for k in b.outcomes}
    if len(kinds) > 1:
        raise ValueError(f"key spaces differ: {sorted(map(str, kinds))}")
    da, db = a.as_dict(), b.as_dict()
    zero = Fraction(0) if (a.exact and b.exact) else 0.0
    total = sum((abs(da.get(k, zero) - db.get(k, zero)) for k in set(da) | set(db)), zero)
    return total / 2


def tv_distance(a, b, bootstrap: int = 200, rng=None) -> TVResult:
    """Exact TV between two FiniteDistributions, or the plug-in TV of two
    sample multisets with a bootstrap standard error."""
    if isinstance(a, FiniteDistribution) and isinstance(b, FiniteDistribution):
        return TVResult(tv_exact(a, b))
    sa, sb = list(a), list(b)
    if not sa or not sb:
        raise ValueError("empty sample")
    value = float(tv_exact(FiniteDistribution.from_samples(sa), FiniteDistribution.from_samples(sb)))
    gen = np.random.default_rng(rng)
    keys = sorted(set(sa) | set(sb))
    index = {k: i for i, k in enumerate(keys)}
    ia = np.array([index[k] for k in sa])
    ib = np.array([index[k] for k in sb])
    reps = []
    for _ in range(bootstrap):
        ca = np.bincount(gen.choice(ia, ia.size), minlength=len(keys)) / ia.size
        cb = np.bincount(gen.choice(ib, ib.size), minlength=len(keys)) / ib.size
        reps.append(0.5 * np.abs(ca - cb).sum())
    return TVResult(value, float(np.std(reps, ddof=1)) if bootstrap > 1 else None)


# -- concentration ---------------------------------------------------------


@dataclass
class ConcentrationReport:
    n: int
    d: int
    trials: int
    mean_Y: float
    se_Y: float
    exact_EY: float | None
    z_Y: float | None
    var_ratio: float
    predicted_ratio: float
    thresholds: dict[str, list[float]]
    exceedance: dict[str, list[float]]
    predicted_bound: float
    covering_checked: int = 0
    extra: dict = field(default_factory=dict)


def exact_expected_y(model: ModelSpec, level: str = "vertex", cap: int = 10**8) -> Fraction | None:
    """``E Y = sum_H P(H in model)`` over perfect matchings ``H`` of K_n.

    ``level="vertex"`` sums the containment probabilities over the exact law
    of the model; ``level="pairing"`` counts sub-pairings and has a closed
    form for the loopless pairing model.  ``None`` when neither is available.
    """
    n = model.n
    if level == "pairing":
        if model.name == "loopless-pairing":
            return expected_loopless_matching_count(n, model.d)
        return None
    if level != "vertex":
        raise ValueError("level must be 'vertex' or 'pairing'")
    if n % 2 or model.name not in ("pairing", "loopless-pairing", "grd"):
        return None
    try:
        law = exact_model_distribution(model.name, n, model.d, cap=cap)
    except (SpaceTooLarge, ValueError):
        return None
    supports = [(set(map(tuple, G.support().pairs.tolist())), pr) for G, pr in zip(law.outcomes, law.probs)]
    total = Fraction(0)
    for H in all_perfect_matchings(n):
        total += sum((pr for sup, pr in supports if all(e in sup for e in H)), Fraction(0))
    return total


def concentration_report(
    model: ModelSpec,
    trials: int,
    rng: RngStream | int = 0,
    C_values: Iterable[float] = (1, 2, 4, 8),
    workers: int = 1,
    max_n: int = 24,
    level: str = "vertex",
) -> ConcentrationReport:
    """Exact per-sample matching counts against the oracle mean; X/W tail sweep."""
    n, d = model.n, model.d
    if n > max_n:
        raise ValueError(f"exact per-sample matching counts are limited to n <= {max_n}")
    names = ["Y" if level == "vertex" else "Y_pairing", "doubles", "triangles"]
    if model.name == "disjoint-doubles":
        names.append("Y_covering")
    summ = empirical_summary(model, names, trials, rng, workers)
    y = summ.values[:, 0]
    ey = exact_expected_y(model, level)
    se = float(np.std(y, ddof=1) / math.sqrt(trials))
    z = None if ey is None else (float(y.mean()) - float(ey)) / se if se > 0 else 0.0
    ref = float(ey) if ey is not None else float(y.mean())
    var_ratio = float(np.mean(y**2) / ref**2) if ref else math.nan
    EX = (d - 1) ** 2 / 4
    EW = (d - 1) ** 3 / 6
    logd = math.log(d) if d > 1 else 0.0
    thr = {"X": [], "W": []}
    exc = {"X": [], "W": []}
    for C in C_values:
        tx = C * math.sqrt(logd * EX)
        tw = C * math.sqrt(logd * EW)
        thr["X"].append(tx)
        thr["W"].append(tw)
        exc["X"].append(float(np.mean(np.abs(summ.values[:, 1] - EX) > tx)))
        exc["W"].append(float(np.mean(np.abs(summ.values[:, 2] - EW) > tw)))
    predicted = 1 + 1 / (4 * d**2) + 2 / (3 * d**3) if d >= 1 else math.nan
    rep = ConcentrationReport(
        n, d, trials, float(y.mean()), se, None if ey is None else float(ey), z, var_ratio, predicted,
        thr, exc, 1 / d**2,
    )
    if "Y_covering" in names:
        rep.covering_checked = trials
        rep.extra["mean_Y_covering"] = float(summ.values[:, 3].mean())
    return rep


def empirical_law(samples: Iterable) -> FiniteDistribution:
    return FiniteDistribution.from_samples(samples)


def frequency_table(samples: Iterable) -> Counter:
    return Counter(samples)
