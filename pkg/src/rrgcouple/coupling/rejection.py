"""Rejection embedding of a pairing-model sample into a superposition of matchings.

``H_1, ..., H_{i*}`` are independent ``M_d^+`` samples, ``i* = floor(tau/d)``,
and ``H`` is their superposition.  ``H_i`` is accepted with probability
``c / w(H_i)`` where ``w = P_{M_d^+}(G) / P_target(G)`` is the likelihood
ratio at the multigraph level, provided ``1/fn <= w <= fn`` (the typical set
``Omega_f``).  Accepted outputs therefore follow the target law conditioned
on ``Omega_f``, and ``P_hat <= H`` by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from ..distributions import FiniteDistribution
from ..enumeration.laws import exact_model_distribution
from ..graphs import Matching, Multigraph
from ..models import sample_perfect_matching
from ..rng import as_generator
from .report import EmbeddingReport

TARGETS = ("loopless-pairing", "grd")


@dataclass(frozen=True)
class RejectionTable:
    """Exact weights for one ``(n, d, target, fn)``."""

    n: int
    d: int
    target: str
    fn: float
    law_target: FiniteDistribution
    law_matchings: FiniteDistribution
    weights: dict  # Multigraph -> Fraction, only on Omega_f
    c: Fraction  # acceptance numerator: accept with probability c / w

    def accept_probability(self, g: Multigraph) -> Fraction:
        w = self.weights.get(g)
        return Fraction(0) if w is None else self.c / w

    def accepted_law(self) -> FiniteDistribution:
        """Target law conditioned on ``Omega_f``: the law of ``P_hat`` given non-empty."""
        return self.law_target.condition(lambda g: g in self.weights)

    def step_acceptance(self) -> Fraction:
        """Probability that one ``M_d^+`` draw is accepted."""
        return sum((self.law_matchings[g] * self.accept_probability(g) for g in self.weights), Fraction(0))


@lru_cache(maxsize=64)
def rejection_table(n: int, d: int, target: str = "loopless-pairing", fn: float = 5.0, normalise: str = "tight"
                    ) -> RejectionTable:
    """Weights ``w`` and the typical set for the rejection step.

    ``normalise="fn"`` uses ``c = 1/fn`` (acceptance ``1/(fn w)``, at least
    ``fn^-2`` on ``Omega_f``); ``"tight"`` uses ``c = min w`` over
    ``Omega_f``, the largest constant that keeps every acceptance
    probability at most 1.  Both give the same accepted law.
    """
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}")
    if fn <= 1:
        raise ValueError("fn must exceed 1")
    law_t = exact_model_distribution(target, n, d)
    law_m = exact_model_distribution(f"matching-superpose({d})", n)
    fnq = Fraction(fn).limit_denominator(10**9)
    weights = {}
    for g, pt in zip(law_t.outcomes, law_t.probs):
        w = law_m[g] / pt
        if 1 / fnq <= w <= fnq:
            weights[g] = w
    if not weights:
        c = Fraction(0)
    elif normalise == "fn":
        c = 1 / fnq
    elif normalise == "tight":
        c = min(weights.values())
    else:
        raise ValueError(f"unknown normalisation {normalise!r}")
    return RejectionTable(n, d, target, fn, law_t, law_m, weights, c)


def empty_probability(table: RejectionTable, steps: int) -> Fraction:
    """Exact ``P(P_hat = empty)`` after ``steps`` independent trials."""
    return (1 - table.step_acceptance()) ** steps


def rejection_embed(
    n: int,
    d: int,
    tau: int,
    fn: float,
    rng=None,
    target: str = "loopless-pairing",
    normalise: str = "tight",
    matchings: Sequence[Matching | Multigraph] | None = None,
) -> EmbeddingReport:
    """Run the rejection procedure once.

    ``matchings`` optionally supplies the ``d * floor(tau/d)`` perfect
    matchings to use (in order) instead of drawing them here.  The report's
    ``inner`` is ``P_hat`` (``None`` for the empty marker) and ``outer`` is
    the superposition ``H`` of all ``i*`` blocks; containment is checked as
    sub-multigraph.
    """
    if n % 2:
        raise ValueError("n must be even")
    if d < 1 or tau < d:
        raise ValueError("need d >= 1 and tau >= d")
    gen = as_generator(rng)
    table = rejection_table(n, d, target, float(fn), normalise)
    i_star = tau // d
    need = d * i_star
    if matchings is not None and len(matchings) < need:
        raise ValueError(f"need {need} matchings, got {len(matchings)}")

    def matching(k: int) -> Multigraph:
        if matchings is not None:
            m = matchings[k]
            return m.to_multigraph() if isinstance(m, Matching) else m
        return sample_perfect_matching(n, gen).to_multigraph()

    blocks = []
    k = 0
    for _ in range(i_star):
        h = Multigraph(n)
        for _ in range(d):
            h = h + matching(k)
            k += 1
        blocks.append(h)
    H = Multigraph(n)
    for h in blocks:
        H = H + h
    P_hat = None
    accepted_at = None
    for i, h in enumerate(blocks):
        a = table.accept_probability(h)
        if a > 0 and gen.random() < float(a):
            P_hat, accepted_at = h, i + 1
            break
    diag = {
        "i_star": i_star,
        "accepted_at": accepted_at,
        "omega_f_size": len(table.weights),
        "support_size": len(table.law_target),
        "target": target,
        "normalise": normalise,
    }
    return EmbeddingReport(P_hat, H, mode="sub-multigraph", decoupled=False, diagnostics=diag)
