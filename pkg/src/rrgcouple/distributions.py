"""Explicit probability vectors over small enumerated outcome spaces."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

FLOAT_TOL = 1e-12


@dataclass(frozen=True)
class FiniteDistribution:
    """Outcomes (hashable, sortable keys) with rational or float weights.

    Exact (``Fraction``) weights must sum to exactly 1; float weights to
    within ``1e-12``.
    """

    outcomes: tuple
    probs: tuple

    def __post_init__(self):
        if len(self.outcomes) != len(self.probs):
            raise ValueError("outcomes and probs differ in length")
        if len(set(self.outcomes)) != len(self.outcomes):
            raise ValueError("duplicate outcomes")
        if any(p < 0 for p in self.probs):
            raise ValueError("negative probability")
        total = sum(self.probs)
        if self.exact:
            if total != 1:
                raise ValueError(f"probabilities sum to {total}, not 1")
        elif abs(total - 1.0) > FLOAT_TOL * max(1, len(self.probs)):
            raise ValueError(f"probabilities sum to {total}, not 1")

    @classmethod
    def from_weights(cls, weights: Mapping[Hashable, int | Fraction | float], exact: bool | None = None
                     ) -> FiniteDistribution:
        """Normalise nonnegative weights.  Integer/Fraction weights stay exact."""
        items = [(k, w) for k, w in weights.items() if w != 0]
        if not items:
            raise ValueError("all weights are zero")
        if exact is None:
            exact = all(isinstance(w, (int, Fraction)) for _, w in items)
        items.sort(key=lambda kw: kw[0])
        total = sum(w for _, w in items)
        if exact:
            probs = tuple(Fraction(w) / Fraction(total) for _, w in items)
        else:
            probs = tuple(float(w) / float(total) for _, w in items)
        return cls(tuple(k for k, _ in items), probs)

    @classmethod
    def from_samples(cls, samples: Iterable[Hashable]) -> FiniteDistribution:
        """Empirical law of a sample multiset (exact rational frequencies)."""
        return cls.from_weights(Counter(samples), exact=True)

    @classmethod
    def uniform(cls, outcomes: Iterable[Hashable]) -> FiniteDistribution:
        return cls.from_weights({o: 1 for o in outcomes}, exact=True)

    @property
    def exact(self) -> bool:
        return all(isinstance(p, (int, Fraction)) for p in self.probs)

    def __len__(self) -> int:
        return len(self.outcomes)

    def __getitem__(self, outcome) -> Fraction | float:
        return self.as_dict().get(outcome, 0)

    def as_dict(self) -> dict:
        d = self.__dict__.get("_dict")
        if d is None:
            d = dict(zip(self.outcomes, self.probs))
            object.__setattr__(self, "_dict", d)
        return d

    def to_float(self) -> FiniteDistribution:
        return FiniteDistribution(self.outcomes, tuple(float(p) for p in self.probs))

    def map(self, fn) -> FiniteDistribution:
        """Push-forward under ``fn``."""
        acc: dict = {}
        for o, p in zip(self.outcomes, self.probs):
            k = fn(o)
            acc[k] = acc.get(k, 0) + p
        return FiniteDistribution.from_weights(acc, exact=self.exact)

    def condition(self, predicate) -> FiniteDistribution:
        return FiniteDistribution.from_weights(
            {o: p for o, p in zip(self.outcomes, self.probs) if predicate(o)}, exact=self.exact)

    def mass(self, predicate) -> Fraction | float:
        return sum((p for o, p in zip(self.outcomes, self.probs) if predicate(o)), Fraction(0) if self.exact else 0.0)

    def sample(self, gen, size: int | None = None):
        import numpy as np

        p = np.array([float(x) for x in self.probs])
        idx = gen.choice(len(self.outcomes), size=size, p=p / p.sum())
        if size is None:
            return self.outcomes[int(idx)]
        return [self.outcomes[int(i)] for i in idx]
