"""Monotone (common uniform) couplings of integer-valued laws."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats


def _pmf_of(dist) -> np.ndarray:
    """Probability vector on ``0..K`` from ``("binom", n, p)``, a frozen scipy
    discrete law with finite support, a FiniteDistribution over integers, a
    mapping, or a plain array."""
    if isinstance(dist, tuple) and dist and dist[0] == "binom":
        _, n, p = dist
        return stats.binom.pmf(np.arange(int(n) + 1), int(n), float(p))
    if hasattr(dist, "pmf") and hasattr(dist, "support"):
        lo, hi = dist.support()
        if not np.isfinite(hi) or lo < 0:
            raise ValueError("need a finite nonnegative support")
        return dist.pmf(np.arange(int(hi) + 1))
    if hasattr(dist, "outcomes") and hasattr(dist, "probs"):
        dist = dict(zip(dist.outcomes, dist.probs))
    if isinstance(dist, dict):
        if any(int(k) != k or k < 0 for k in dist):
            raise ValueError("outcomes must be nonnegative integers")
        out = np.zeros(int(max(dist)) + 1)
        for k, p in dist.items():
            out[int(k)] += float(p)
        return out
    return np.asarray(dist, dtype=float)


@dataclass
class QuantileCoupling:
    """``X = F_X^{-1}(U)``, ``Y = F_Y^{-1}(U)`` for one uniform ``U``."""

    pmf_x: np.ndarray
    pmf_y: np.ndarray
    dominated: bool

    def __post_init__(self):
        self.cdf_x = np.minimum(np.cumsum(self.pmf_x), 1.0)
        self.cdf_y = np.minimum(np.cumsum(self.pmf_y), 1.0)
        self.cdf_x[-1] = self.cdf_y[-1] = 1.0

    def joint(self) -> dict[tuple[int, int], float]:
        """Weights of the comonotone joint law (merge of CDF breakpoints)."""
        out: dict[tuple[int, int], float] = {}
        i = j = 0
        lo = 0.0
        while i < self.cdf_x.size and j < self.cdf_y.size:
            hi = min(self.cdf_x[i], self.cdf_y[j])
            if hi > lo:
                out[(i, j)] = out.get((i, j), 0.0) + hi - lo
                lo = hi
            if self.cdf_x[i] <= hi:
                i += 1
            if self.cdf_y[j] <= hi:
                j += 1
        return out

    def prob_x_le_y(self) -> float:
        return sum(w for (a, b), w in self.joint().items() if a <= b)

    def sample(self, gen: np.random.Generator, size: int | None = None):
        u = gen.random(size)
        x = np.searchsorted(self.cdf_x, u, side="right")
        y = np.searchsorted(self.cdf_y, u, side="right")
        return x, y

    def sample_x_given_y(self, gen: np.random.Generator, y) -> np.ndarray:
        """Draw ``X`` from its conditional law given ``Y = y`` under this coupling."""
        y = np.asarray(y, dtype=np.int64)
        lo = np.where(y > 0, self.cdf_y[np.maximum(y - 1, 0)], 0.0)
        hi = self.cdf_y[np.minimum(y, self.cdf_y.size - 1)]
        u = lo + (hi - lo) * gen.random(y.shape)
        return np.minimum(np.searchsorted(self.cdf_x, u, side="right"), self.cdf_x.size - 1)


def stochastically_dominated(pmf_x: np.ndarray, pmf_y: np.ndarray, tol: float = 1e-12) -> bool:
    """``X <= Y`` in the usual stochastic order: ``F_X(k) >= F_Y(k)`` for all ``k``."""
    K = max(pmf_x.size, pmf_y.size)
    fx = np.cumsum(np.pad(pmf_x, (0, K - pmf_x.size)))
    fy = np.cumsum(np.pad(pmf_y, (0, K - pmf_y.size)))
    return bool(np.all(fx >= fy - tol))


def quantile_coupling(distX, distY, tol: float = 1e-12) -> QuantileCoupling:
    """Comonotone coupling of two integer laws with the domination flag."""
    px, py = _pmf_of(distX), _pmf_of(distY)
    if np.any(px < 0) or np.any(py < 0):
        raise ValueError("negative probability")
    return QuantileCoupling(px, py, stochastically_dominated(px, py, tol))
