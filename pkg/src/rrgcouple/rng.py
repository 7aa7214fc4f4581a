"""Reproducible random streams.

A stream is identified by ``(seed, index)``.  Streams are derived with
:class:`numpy.random.SeedSequence` spawn keys, so stream ``k`` is the same no
matter how many other streams were created or consumed before it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass
class RngStream:
    seed: int
    index: int = 0
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("stream index must be nonnegative")
        ss = np.random.SeedSequence(entropy=self.seed & _MASK64, spawn_key=(self.index,))
        self.generator = np.random.Generator(np.random.Philox(ss))

    def child(self, sub: int) -> RngStream:
        """Deterministic sub-stream, used when one trial needs several independent parts."""
        return _SubStream(self.seed, self.index, (sub,))


class _SubStream(RngStream):
    def __init__(self, seed: int, index: int, path: tuple[int, ...]):
        self.seed = seed
        self.index = index
        self.path = path
        ss = np.random.SeedSequence(entropy=seed & _MASK64, spawn_key=(index, *path))
        self.generator = np.random.Generator(np.random.Philox(ss))

    def child(self, sub: int) -> RngStream:
        return _SubStream(self.seed, self.index, (*self.path, sub))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, index={self.index}, path={self.path})"


def rng_stream(seed: int, index: int = 0) -> RngStream:
    return RngStream(seed, index)


def as_generator(rng) -> np.random.Generator:
    """Accept an RngStream, a numpy Generator, an int seed or None."""
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return np.random.default_rng(rng)
    raise TypeError(f"cannot make a random generator from {type(rng).__name__}")
