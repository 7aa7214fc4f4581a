"""Threshold functions for the d-out into G(n, p) embedding.

``f1(x) = -((x-1)/x) / W(-(x-1)/(x e))`` with ``W`` the lower Lambert branch;
``f2`` is the two-piece bound; ``f`` is a concrete continuous strictly
increasing function with ``f(1) = 0``, ``f < f2`` on ``(1, inf)`` and limit
1/2; ``g = f/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INV_E = math.exp(-1.0)
RESIDUAL_TOL = 1e-12
BREAK = 2.1
BLEND_WIDTH = 0.1


def lambertw_lower(z: float, tol: float = RESIDUAL_TOL, max_iter: int = 100) -> float:
    """Branch ``W_{-1}`` on ``[-1/e, 0)``: the solution ``w <= -1`` of ``w e^w = z``.

    Newton iteration from a series/asymptotic start; falls back to bisection
    on ``(-inf, -1]`` if Newton leaves the branch or stalls.
    """
    z = float(z)
    if not (-INV_E - 1e-15 <= z < 0.0):
        raise ValueError(f"lower branch defined on [-1/e, 0), got {z}")
    if z <= -INV_E:
        return -1.0
    # starting point
    p = math.sqrt(max(0.0, 2.0 * (1.0 + math.e * z)))
    if z < -0.25:
        w = -1.0 - p - p * p / 3.0
    else:
        L1 = math.log(-z)
        L2 = math.log(-L1)
        w = L1 - L2 + L2 / L1
    for _ in range(max_iter):
        ew = math.exp(w)
        r = w * ew - z
        if r == 0.0:
            return w
        step = r / ((w + 1.0) * ew) if w != -1.0 else 0.0
        w_new = w - step
        if not math.isfinite(w_new) or w_new > -1.0 or step == 0.0:
            break
        w = w_new
        if abs(step) <= 4e-16 * abs(w):
            if abs(w * math.exp(w) - z) <= tol:
                return w
            break
    return _lambertw_lower_bisect(z, tol)


def _lambertw_lower_bisect(z: float, tol: float) -> float:
    # h(w) = w e^w - z is decreasing on (-inf, -1], h(-1) <= 0
    hi = -1.0
    lo = -2.0
    while lo * math.exp(lo) - z <= 0:
        lo *= 2.0
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        r = mid * math.exp(mid) - z
        if hi - lo <= 4e-16 * abs(mid) or (abs(r) <= tol * abs(z) and abs(r) <= tol):
            return mid
        if r > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def f1(x: float) -> float:
    """Minimum out-degree profile: increasing on ``[1, inf)``, ``f1(1) = 0``, limit 1."""
    x = float(x)
    if x < 1.0:
        raise ValueError(f"x must be >= 1, got {x}")
    if x == 1.0:
        return 0.0
    arg = -((x - 1.0) / x) / math.e
    return -((x - 1.0) / x) / lambertw_lower(arg)


@dataclass(frozen=True)
class ThresholdFunctions:
    """Concrete threshold family.

    ``safety`` shrinks ``f`` below ``f2`` by the factor ``1 - safety / x``
    (so ``f(x) / f2(x) -> 1`` and ``f -> 1/2``).  Between ``2.1`` and
    ``2.1 + BLEND_WIDTH`` the two pieces are joined linearly so that ``f`` is
    continuous across the upward jump of ``f2`` at ``2.1``.
    """

    eps0: float = 0.1
    safety: float = 1e-3

    def f2(self, x: float) -> float:
        x = float(x)
        if x < 1.0:
            raise ValueError(f"x must be >= 1, got {x}")
        if x <= BREAK:
            return self.eps0**2 / 1.1**2 * (x - 1.0) ** 2 / x
        return f1(x) / 2.0

    def _shrink(self, x: float) -> float:
        return 1.0 - self.safety / x

    def f(self, x: float) -> float:
        x = float(x)
        if x < 1.0:
            raise ValueError(f"x must be >= 1, got {x}")
        if x <= BREAK:
            return self._shrink(x) * self.f2(x)
        upper = self._shrink(x) * f1(x) / 2.0
        if x >= BREAK + BLEND_WIDTH:
            return upper
        a = self._shrink(BREAK) * self.f2(BREAK)
        t = (x - BREAK) / BLEND_WIDTH
        return a + (upper - a) * t

    def g(self, x: float) -> float:
        return self.f(x) / 2.0


DEFAULT_THRESHOLDS = ThresholdFunctions()


def f2(x: float, eps0: float = 0.1) -> float:
    return ThresholdFunctions(eps0).f2(x)


def f(x: float, eps0: float = 0.1, safety: float = 1e-3) -> float:
    return ThresholdFunctions(eps0, safety).f(x)


def g(x: float, eps0: float = 0.1, safety: float = 1e-3) -> float:
    return ThresholdFunctions(eps0, safety).g(x)


def theta(alpha: float, beta: float) -> float:
    """Exponent of the count of vertices of degree at most ``beta log n`` in
    ``G(n, alpha log n / n)``: ``1 - alpha + beta log(e alpha / beta)``."""
    if beta <= 0:
        return 1.0 - alpha
    return 1.0 - alpha + beta * math.log(math.e * alpha / beta)


def threshold_eval(which: str, x: float, eps0: float = 0.1, safety: float = 1e-3) -> float:
    """Dispatch by name: ``f1``, ``f2``, ``f``, ``g`` or ``lambertW-``."""
    tf = ThresholdFunctions(eps0, safety)
    table = {"f1": f1, "f2": tf.f2, "f": tf.f, "g": tf.g, "lambertW-": lambertw_lower}
    if which not in table:
        raise ValueError(f"unknown threshold function {which!r}")
    return table[which](x)


def grid(fn, lo: float, hi: float, num: int = 1000) -> np.ndarray:
    xs = np.linspace(lo, hi, num)
    return np.array([fn(v) for v in xs])
