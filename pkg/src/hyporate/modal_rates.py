"""Mode-by-mode decay rates for kinetic models with a Gaussian equilibrium.

For a Fourier mode of modulus ``s`` the abstract constants are
``(lambda_m, lambda_M, C_M) = (1, s^2, s (1 + sqrt(3) s)/(1 + s^2))`` and the
decay rate of the twisted norm is the largest ``lambda`` for which one of the
discriminants ``h1``, ``h2``, ``h2_tilde``, ``h3`` is nonpositive for some
``delta`` in the matching triangle.

Each discriminant is a quadratic in ``delta``, so for fixed ``lambda`` the
best ``delta`` is the vertex clipped to the triangle.  The feasible lambdas
form an interval ``(0, lambda_i(s)]``, found by bisection.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from . import kernels
from ._parallel import pmap
from .abstract_rates import AbstractConstants
from .errors import InfeasibleMode

SQRT3 = math.sqrt(3.0)
LAMBDA_ITERS = 60

VARIANTS = ("lambda0", "lambda1", "lambda2", "lambda2_tilde", "lambda3")
_CODES = {"lambda1": kernels.H1, "lambda2": kernels.H2, "lambda3": kernels.H3}


@dataclass(frozen=True)
class RatePoint:
    s: float
    delta: float
    lam: float
    C_of_s: float


@dataclass(frozen=True)
class RateCurve:
    variant: str
    points: tuple
    eps: float | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def s(self):
        return [p.s for p in self.points]

    @property
    def lambdas(self):
        return [p.lam for p in self.points]

    @property
    def deltas(self):
        return [p.delta for p in self.points]

    def to_rows(self):
        return [(p.s, p.delta, p.lam, p.C_of_s) for p in self.points]


def norm_constant(s: float, delta: float, eps: float = 1.0) -> float:
    """Norm-equivalence constant ``(e^2+s^2+delta s)/(e^2+s^2-delta s)``."""
    base = eps * eps + s * s
    den = base - delta * s
    if not den > 0:
        return math.inf
    return (base + delta * s) / den


def constants_of_mode(s: float) -> AbstractConstants:
    if not s > 0:
        raise ValueError("s must be positive")
    return AbstractConstants(1.0, s * s, s * (1.0 + SQRT3 * s) / (1.0 + s * s))


def lambda0_delta0(s: float) -> RatePoint:
    """The baseline explicit rate of the abstract method for mode ``s``."""
    if not s > 0:
        raise ValueError("s must be positive")
    w = (1.0 + SQRT3 * s) ** 2
    lam = s * s / (3.0 * w)
    delta = (1.0 + s * s) / (2.0 * w)
    return RatePoint(s, delta, lam, norm_constant(s, delta))


def h1(delta: float, lam: float, s: float) -> float:
    return kernels.disc_value(kernels.H1, delta, lam, s, 1.0)


def h2(delta: float, lam: float, s: float) -> float:
    return kernels.disc_value(kernels.H2, delta, lam, s, 1.0)


def h2_tilde(delta: float, lam: float, s: float) -> float:
    return kernels.disc_value(kernels.H2_TILDE, delta, lam, s, 1.0)


def h3(delta: float, lam: float, eps: float, s: float) -> float:
    return kernels.disc_value(kernels.H3, delta, lam, s, eps)


def h_diffusion(delta: float, lam: float, eps: float, s: float) -> float:
    """Discriminant of the parabolically rescaled mode (rate ``lam * eps``)."""
    return kernels.disc_value(kernels.DIFFUSION, delta, lam, s, eps)


def delta_star_substitution(delta: float, eps: float, s: float) -> float:
    """Map a delta of the eps-scaled functional to the unscaled one."""
    return delta * (1.0 + s * s) / (eps * eps + s * s)


def lambda2_tilde(s: float) -> float:
    """Closed-form rate obtained from ``h2_tilde``.

    Algebraically identical to the textbook expression
    ``(A - sqrt(D)) / (7 s^2 + 2 (2+sqrt3) s + 2)`` with
    ``A = 7 s^2 + 2 (1+sqrt3) s + 1``; since ``A^2 - D`` equals ``4 s^2`` times
    the denominator, the rationalized form ``4 s^2 / (A + sqrt(D))`` avoids the
    cancellation that ruins the textbook form for small and large ``s``.
    """
    if not s > 0:
        raise ValueError("s must be positive")
    a = 7.0 * s * s + 2.0 * (1.0 + SQRT3) * s + 1.0
    d = (21.0 * s ** 4 + 4.0 * (3.0 + 5.0 * SQRT3) * s ** 3
         + (22.0 + 8.0 * SQRT3) * s * s + 4.0 * (1.0 + SQRT3) * s + 1.0)
    return 4.0 * s * s / (a + math.sqrt(d))


def lambda2_tilde_printed(s: float) -> float:
    """The same rate evaluated literally (loses digits away from s ~ 1)."""
    a = 7.0 * s * s + 2.0 * (1.0 + SQRT3) * s + 1.0
    d = (21.0 * s ** 4 + 4.0 * (3.0 + 5.0 * SQRT3) * s ** 3
         + (22.0 + 8.0 * SQRT3) * s * s + 4.0 * (1.0 + SQRT3) * s + 1.0)
    return (a - math.sqrt(d)) / (7.0 * s * s + 2.0 * (2.0 + SQRT3) * s + 2.0)


def delta2_tilde(s: float) -> float:
    lam = lambda2_tilde(s)
    return ((s * s + 1.0) / s) * (lam * lam - lam + 2.0 * s) / (7.0 * s * s + 2.0 * SQRT3 * s + 1.0 - lam * lam)


def in_triangle(variant: str, delta: float, lam: float, s: float, eps: float = 1.0,
                margin: float = 0.0) -> bool:
    """Membership of ``(delta, lambda)`` in the triangle attached to ``variant``."""
    if variant in ("lambda0", "lambda1"):
        # the fixed triangle T_m with lambda_m = 1
        return delta > margin and lam > margin and lam < 2.0 * (1.0 - delta) - margin and delta < 1.0 - margin
    e2 = eps * eps if variant == "lambda3" else 1.0
    k = s * s / (e2 + s * s)
    return (delta > margin and lam > margin and delta * k < 1.0 - margin
            and lam < 2.0 * (1.0 - delta * k) - margin)


def _optimized_point(code: int, s: float, eps: float) -> tuple:
    lam, delta = kernels.max_rate(code, s, eps, LAMBDA_ITERS)
    if not lam > 0:
        raise InfeasibleMode(f"no feasible (delta, lambda) for s={s!r}")
    return lam, delta


def max_rate(variant: str, s: float, eps: float = 1.0) -> RatePoint:
    """Rate point of one variant at one mode."""
    if not s > 0:
        raise ValueError("s must be positive")
    if variant == "lambda0":
        return lambda0_delta0(s)
    if variant == "lambda2_tilde":
        d = delta2_tilde(s)
        return RatePoint(s, d, lambda2_tilde(s), norm_constant(s, d))
    if variant not in _CODES:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if variant == "lambda3" and not eps > 0:
        raise ValueError("eps must be positive")
    e = eps if variant == "lambda3" else 1.0
    lam, delta = _optimized_point(_CODES[variant], s, e)
    return RatePoint(s, delta, lam, norm_constant(s, delta, e))


def lambda_curve(variant: str, s_grid, eps: float = 1.0) -> RateCurve:
    """Sample ``s -> (delta_i(s), lambda_i(s))`` on an ascending grid."""
    grid = [float(x) for x in s_grid]
    if not grid:
        raise ValueError("empty s grid")
    if any(x <= 0 for x in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("s grid must be positive and strictly ascending")
    pts = tuple(pmap(lambda s: max_rate(variant, s, eps), grid))
    meta = {}
    if variant == "lambda3":
        ref = pmap(lambda s: max_rate("lambda2", s).lam, grid)
        dev = max(abs(p.lam - r) for p, r in zip(pts, ref))
        meta["max_deviation_from_lambda2"] = dev
        if dev > 1e-8:
            warnings.warn(f"lambda3 differs from lambda2 by {dev:.3e}", RuntimeWarning, stacklevel=2)
    return RateCurve(variant, pts, eps if variant == "lambda3" else None, meta)


def diffusion_limit_rate(s: float, eps_grid) -> list:
    """Optimal ``(eps, lambda_eps, delta_eps)`` of the parabolically scaled mode."""
    if not s > 0:
        raise ValueError("s must be positive")
    out = []
    for eps in eps_grid:
        if not eps > 0:
            raise ValueError("eps values must be positive")
        lam, delta = _optimized_point(kernels.DIFFUSION, s, float(eps))
        out.append((float(eps), lam, delta))
    return out


def h_GT(delta: float, lam: float, xi: float) -> float:
    """Refined discriminant of the Goldstein-Taylor mode ``xi`` (sigma = 1)."""
    x2 = xi * xi
    k = x2 / (1.0 + x2)
    return (delta * delta * x2 / (1.0 + x2) ** 2 * (1.0 - lam) ** 2
            - 4.0 * (1.0 - delta * k - 0.5 * lam) * (delta * k - 0.5 * lam))


def gt_sharp_rate(xi: float) -> tuple:
    """``(delta_bar(xi), 1)``: the parameter that makes ``h_GT`` vanish at rate 1."""
    if xi == 0:
        raise ValueError("xi must be nonzero")
    return (1.0 + xi * xi) / (2.0 * xi * xi), 1.0
