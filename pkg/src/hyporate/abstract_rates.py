"""Twisted-norm decay rates from the three abstract hypocoercivity constants.

Given the microscopic coercivity constant ``lambda_m``, the macroscopic one
``lambda_M`` and the auxiliary-operator bound ``C_M``, the Lyapunov functional
``H = |F|^2/2 + delta Re<AF, F>`` decays like ``exp(-lambda t)`` as soon as the
discriminant ``h_star(delta, lambda)`` is nonpositive inside the admissible
triangle ``0 < delta < lambda_m``, ``lambda < 2 (lambda_m - delta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._numerics import bisect_root, golden_min
from .errors import EmptyFeasibleSet


@dataclass(frozen=True)
class AbstractConstants:
    lambda_m: float
    lambda_M: float
    C_M: float

    def __post_init__(self):
        for name in ("lambda_m", "lambda_M", "C_M"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")

    @property
    def K_M(self) -> float:
        return self.lambda_M / (1.0 + self.lambda_M)

    @property
    def delta_star(self) -> float:
        """Upper end of the delta range where ``h_star(delta, 0) < 0``."""
        k = self.K_M
        return 4.0 * k * self.lambda_m / (4.0 * k + self.C_M ** 2)


@dataclass(frozen=True)
class TwistChoice:
    delta: float
    lam: float
    c_minus: float
    c_plus: float

    @property
    def C_factor(self) -> float:
        return self.c_plus / self.c_minus


def improved_twist(delta: float, lam: float) -> TwistChoice:
    """Twist with the improved norm-equivalence constants ``(2 -+ delta)/4``."""
    return TwistChoice(delta, lam, (2.0 - delta) / 4.0, (2.0 + delta) / 4.0)


def C_star(delta: float) -> float:
    return (2.0 + delta) / (2.0 - delta)


def rate_bdms(k: AbstractConstants) -> TwistChoice:
    """The baseline explicit choice of delta and lambda.

    This keeps the original equivalence constants ``(1 -+ delta)/2``, so its
    ``C_factor`` is ``(1+delta)/(1-delta)``, not ``C_star(delta)``.
    """
    m = min(1.0, k.lambda_m, k.lambda_m * k.lambda_M / ((1.0 + k.lambda_M) * k.C_M ** 2))
    lam = k.lambda_M / (3.0 * (1.0 + k.lambda_M)) * m
    delta = 0.5 * m
    return TwistChoice(delta, lam, (1.0 - delta) / 2.0, (1.0 + delta) / 2.0)


def h_star(delta: float, lam: float, k: AbstractConstants) -> float:
    return (delta ** 2 * (k.C_M + 0.5 * lam) ** 2
            - 4.0 * (k.lambda_m - delta - 0.5 * lam) * (delta * k.K_M - 0.5 * lam))


def _h_star_lambda_coeffs(delta: float, k: AbstractConstants):
    # h_star as A lam^2 + B lam + C0; A < 0 for delta < 2
    a = k.lambda_m - delta
    b = delta * k.K_M
    A = 0.25 * delta * delta - 1.0
    B = delta * delta * k.C_M + 2.0 * (a + b)
    C0 = delta * delta * k.C_M ** 2 - 4.0 * a * b
    return A, B, C0


def lambda_star(delta: float, k: AbstractConstants) -> float:
    """Largest lambda in the triangle with ``h_star(delta, lambda) <= 0``.

    For ``0 < delta < delta_star`` the parabola ``lambda -> h_star`` is negative
    at 0 and positive at ``2 (lambda_m - delta)``; the answer is its unique
    root in between, i.e. the smaller root of a downward parabola.
    """
    if not delta > 0:
        raise EmptyFeasibleSet("delta must be positive")
    if delta >= k.delta_star:
        raise EmptyFeasibleSet(f"delta={delta!r} is not below delta_star={k.delta_star!r}")
    hi = 2.0 * (k.lambda_m - delta)
    A, B, C0 = _h_star_lambda_coeffs(delta, k)
    disc = B * B - 4.0 * A * C0
    root = math.nan
    if disc >= 0 and A != 0:
        root = -2.0 * C0 / (B + math.sqrt(disc))
    if not (0.0 < root < hi) or abs(h_star(delta, root, k)) > 1e-12 * max(1.0, abs(C0)):
        root = bisect_root(lambda x: h_star(delta, x, k), 0.0, hi, iters=200)
    return root


def _delta_upper(k: AbstractConstants) -> float:
    return min(2.0, k.delta_star)


def optimize_rate(k: AbstractConstants, iters: int = 80, starts: int = 16) -> TwistChoice:
    """Maximize ``lambda_star`` over delta in ``(0, min(2, delta_star))``.

    A golden-section search over the whole interval is cross-checked by a
    multistart: the interval is cut into ``starts`` cells, the best grid cell is
    refined as well, and the larger of the two results wins.
    """
    top = _delta_upper(k)
    eps = 1e-14 * top

    def neg(d):
        if d <= 0 or d >= k.delta_star:
            return 0.0
        return -lambda_star(d, k)

    d1, v1 = golden_min(neg, eps, top - eps, iters=iters)
    grid = [top * (j + 0.5) / starts for j in range(starts)]
    j = min(range(starts), key=lambda i: neg(grid[i]))
    lo = max(eps, grid[j] - top / starts)
    hi = min(top - eps, grid[j] + top / starts)
    d2, v2 = golden_min(neg, lo, hi, iters=iters)
    d, v = (d1, v1) if v1 <= v2 else (d2, v2)
    return improved_twist(d, -v)
