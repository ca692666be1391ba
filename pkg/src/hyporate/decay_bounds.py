"""Algebraic decay on the whole space and exponential decay on small tori.

Nash-type bounds split Fourier space at a radius ``R``: low frequencies are
controlled by the ``L^1`` mass, high ones by the modal decay rate, and ``R`` is
then optimized.  The Goldstein-Taylor bounds on the line (``sigma = 1``) use
the slow modal gap ``mu(s) = (1 - sqrt(1 - 4 s^2))/2`` for ``s < 1/2``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

from . import kernels
from ._numerics import adaptive_simpson, geomspace, golden_min, scan_golden_min
from .errors import EpsTooLarge, NonMonotoneRate, RangeError
from .modal_rates import delta2_tilde, lambda2_tilde, norm_constant
from .spectral_lyapunov import mu_tilde

QUAD_TOL = 1e-10
GOLDEN_ITERS = 60
GT_R_BRACKET = (1e-6, 0.5 - 1e-9)
XI1 = (math.sqrt(5.0) - 1.0) / 4.0
B_SUP = math.sqrt(math.pi / 8.0)
LAMBDA_STAR_LOWER = 1.0 - math.sqrt(3.0 / 7.0)


def omega(d: int) -> float:
    """Volume of the unit ball in dimension ``d``, ``|S^{d-1}|/d``."""
    return math.pi ** (0.5 * d) / math.gamma(0.5 * d + 1.0)


@dataclass(frozen=True)
class NashProfile:
    d: int
    lambda_fn: object
    C_fn: object = None
    M: float = 1.0
    Q: float = 1.0
    C_sup_fn: object = None

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError("d must be a positive integer")
        if self.M < 0 or self.Q < 0:
            raise ValueError("M and Q must be nonnegative")

    @property
    def omega_d(self) -> float:
        return omega(self.d)

    def C(self, s: float) -> float:
        return 1.0 if self.C_fn is None else float(self.C_fn(s))

    def C_sup(self, R: float) -> float:
        """``sup_{s >= R} C(s)`` (closed form if given, else a dense log grid)."""
        if self.C_fn is None:
            return 1.0
        if self.C_sup_fn is not None:
            return float(self.C_sup_fn(R))
        return max(self.C(s) for s in geomspace(R, R * 1e8, 1601))

    def check_rate(self, lo: float = 1e-6, hi: float = 1e6, n: int = 400) -> None:
        grid = geomspace(lo, hi, n)
        vals = [float(self.lambda_fn(s)) for s in grid]
        if any(v <= 0 for v in vals):
            raise NonMonotoneRate("the rate function must be positive")
        for a, b in zip(vals, vals[1:]):
            if b < a * (1.0 - 1e-12):
                raise NonMonotoneRate("the rate function must be nondecreasing")


@dataclass(frozen=True)
class EnvelopeSample:
    t: float
    bound: float
    argmin_R: float
    at_boundary: bool = False


def heat_profile(d: int = 1, M: float = 1.0, Q: float = 1.0) -> NashProfile:
    """``lambda(s) = 2 s^2`` capped at 2 for ``s >= 1``, constant ``C = 1``."""
    return NashProfile(d, lambda s: 2.0 * min(s, 1.0) ** 2, None, M, Q)


def c_d(d: int) -> float:
    return 0.5 * ((d + 2.0) / 2.0) ** (1.0 + 2.0 / d) * omega(d) ** (2.0 / d)


# ---------------------------------------------------------------------------
# Nash lemma
# ---------------------------------------------------------------------------

def nash_h(M: float, R: float, s: float, profile: NashProfile) -> float:
    return float(profile.lambda_fn(R)) * (profile.omega_d * R ** profile.d * M * M - s)


def lambda_ast(M: float, s: float, profile: NashProfile) -> float:
    """``-min_R h(M, R, s)``; the minimizer lies below ``(s/(omega M^2))^{1/d}``."""
    if not (M > 0 and s > 0):
        raise ValueError("M and s must be positive")
    r_top = (s / (profile.omega_d * M * M)) ** (1.0 / profile.d)
    _, v = golden_min(lambda R: nash_h(M, R, s, profile), r_top * 1e-8, r_top, iters=GOLDEN_ITERS,
                      log_scale=True)
    return -v


def lambda_ast_heat(M: float, s: float, d: int) -> float:
    """Closed form for the heat profile (valid while the minimizer is below 1)."""
    return 2.0 * d * (2.0 / (omega(d) * M * M)) ** (2.0 / d) * (s / (d + 2.0)) ** (1.0 + 2.0 / d)


@functools.lru_cache(maxsize=32)
def _lambda_ast_cached(profile: NashProfile):
    @functools.lru_cache(maxsize=65536)
    def f(z):
        return lambda_ast(profile.M, z, profile)

    return f


def _inv_lam_integral(lam, a: float, b: float) -> float:
    # int dz / lambda*(z) over [e^a, e^b], in log variables
    return adaptive_simpson(lambda w: math.exp(w) / lam(math.exp(w)), a, b, QUAD_TOL, 40, rel=1e-13)


def psi(s: float, profile: NashProfile, _lam=None) -> float:
    """``-int_1^s dz / lambda*(M, z)``."""
    if not s > 0:
        raise ValueError("s must be positive")
    lam = _lam or _lambda_ast_cached(profile)
    if s == 1.0:
        return 0.0
    # integrate in log z for uniform accuracy across scales
    return -_inv_lam_integral(lam, 0.0, math.log(s))


def psi_heat(s: float, profile: NashProfile) -> float:
    return c_d(profile.d) * profile.M ** (4.0 / profile.d) * (s ** (-2.0 / profile.d) - 1.0)


def psi_inverse(y: float, profile: NashProfile, _lam=None) -> float:
    """Solve ``psi(s) = y``.

    ``psi`` is decreasing with ``psi'(s) = -1/lambda*(s)``.  Newton steps in
    ``log s`` are safeguarded by a bracket; each step integrates only between
    consecutive iterates, so ``psi`` is never recomputed from 1.
    """
    lam = _lam or _lambda_ast_cached(profile)

    def seg(a, b):  # psi(b) - psi(a), in log variables
        return -_inv_lam_integral(lam, a, b)

    w, val = 0.0, 0.0  # log s and psi(s) at s = 1
    lo, hi = -math.inf, math.inf
    for _ in range(200):
        f = val - y
        if f > 0:
            lo = w
        else:
            hi = w
        if abs(f) <= 1e-13 * max(1.0, abs(y)) or hi - lo < 1e-14:
            break
        s = math.exp(w)
        step = f * lam(s) / s  # Newton step in w: f / (d psi/dw) with d psi/dw = -s/lambda*
        # psi grows exponentially as w decreases, so undamped steps overshoot
        nw = w + max(-1.0, min(1.0, step))
        if not lo < nw < hi:
            if math.isinf(lo) or math.isinf(hi):
                nw = w + (2.0 if f > 0 else -2.0)
            else:
                nw = 0.5 * (lo + hi)
        val += seg(w, nw)
        w = nw
    return math.exp(w)


def nash_decay(t: float, y0_sq: float, profile: NashProfile) -> float:
    """``psi^{-1}(t + psi(y0_sq))``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return y0_sq
    profile.check_rate()
    lam = _lambda_ast_cached(profile)
    return psi_inverse(t + psi(y0_sq, profile, lam), profile, lam)


def nash_decay_heat(t: float, y0_sq: float, profile: NashProfile) -> float:
    d = profile.d
    return (y0_sq ** (-2.0 / d) + t / (c_d(d) * profile.M ** (4.0 / d))) ** (-0.5 * d)


# ---------------------------------------------------------------------------
# Hypocoercive Nash envelope
# ---------------------------------------------------------------------------

def psi_envelope(t: float, profile: NashProfile, R_bracket=(1e-6, 1e3)) -> EnvelopeSample:
    """Minimize the split bound over ``R`` (log-grid scan, then golden section).

    If the minimizer sits at an end of ``R_bracket`` the sample is returned
    with ``at_boundary=True``.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    d = profile.d
    area = profile.omega_d * d * profile.M ** 2

    def low(s):
        s = max(s, 1e-300)  # the integrand extends continuously to s = 0
        return profile.C(s) * math.exp(-float(profile.lambda_fn(s)) * t) * s ** (d - 1)

    def g(R):
        first = area * adaptive_simpson(low, 0.0, R, QUAD_TOL, 40)
        return first + profile.C_sup(R) * math.exp(-float(profile.lambda_fn(R)) * t) * profile.Q ** 2

    lo, hi = R_bracket
    R, v = scan_golden_min(g, lo, hi, iters=GOLDEN_ITERS)
    edge = abs(math.log(R / lo)) < 1e-6 or abs(math.log(hi / R)) < 1e-6
    return EnvelopeSample(t, v, R, edge)


def gaussian_mode_profile(d: int = 1, M: float = 1.0, Q: float = 1.0) -> NashProfile:
    """Rate ``lambda2_tilde`` and constant from ``delta2_tilde``."""
    return NashProfile(d, lambda2_tilde, _C_tilde, M, Q, _sup_C_tilde)


# ---------------------------------------------------------------------------
# Goldstein-Taylor on the line, sigma = 1
# ---------------------------------------------------------------------------

def mu_line(s: float) -> float:
    """Slow modal gap at ``sigma = 1``: ``(1 - sqrt(1-4 s^2))/2`` below 1/2, else 1/2."""
    s = abs(s)
    r = 1.0 - 4.0 * s * s
    if r <= 0:
        return 0.5
    return 2.0 * s * s / (1.0 + math.sqrt(r))


def alpha_ratio(s: float) -> float:
    """``mu_tilde(s)/s^2``, so that ``exp(-2 mu_tilde t) = exp(-2 alpha s^2 t)``.

    Equal to 1 at ``s = 0`` and at ``s = XI1``, and at least 1 in between.
    """
    if s == 0:
        return 1.0
    return mu_tilde(s) / (s * s)


def gt_line_modal_bound(xi: float, R: float) -> tuple:
    """``(c, lambda)`` such that ``|y(t, xi)|^2 <= c exp(-lambda t) |y(0, xi)|^2``."""
    if not 0 < R < 0.5:
        raise RangeError("R must lie in (0, 1/2)")
    if xi == 0:
        raise RangeError("xi must be nonzero")
    ax = abs(xi)
    if ax < R:
        return (1.0 + 2.0 * ax) / (1.0 - 2.0 * ax), 2.0 * mu_line(ax)
    return (ax + 2.0 * R * R) / (ax - 2.0 * R * R), 2.0 * mu_line(R)


def gt_B(t: float, R: float) -> float:
    """``sqrt(t) int_0^R exp(-2 mu(s) t) ds``."""
    return kernels.gt_B_integral(float(t), float(R), QUAD_TOL)


def _gt_global_objective(t: float, R: float, l1: float, l2: float) -> float:
    c = (1.0 + 2.0 * R) / (1.0 - 2.0 * R)
    if t > 0:
        low = min(gt_B(t, R) / math.sqrt(t), R)
    else:
        low = R
    return c * (2.0 * low * l1 + math.exp(-2.0 * mu_line(R) * t) * l2)


def gt_line_global_envelope(t: float, y0_L1_sq: float, y0_L2_sq: float) -> EnvelopeSample:
    if t < 0:
        raise ValueError("t must be nonnegative")
    lo, hi = GT_R_BRACKET
    R, v = scan_golden_min(lambda r: _gt_global_objective(t, r, y0_L1_sq, y0_L2_sq), lo, hi,
                           iters=GOLDEN_ITERS)
    edge = abs(math.log(R / lo)) < 1e-6 or abs(math.log(hi / R)) < 1e-6
    return EnvelopeSample(t, v, R, edge)


def gt_line_global_bound(t: float, y0_L1_sq: float, y0_L2_sq: float) -> float:
    return gt_line_global_envelope(t, y0_L1_sq, y0_L2_sq).bound


def _gt_ptilde_objective(t: float, R: float, l1: float, l2: float) -> float:
    c = (1.0 + 2.0 * R + 4.0 * R * R) / (1.0 - 2.0 * R + 4.0 * R * R)
    low = 2.0 * R if t == 0 else min(2.0 * R, math.sqrt(math.pi / (2.0 * t)))
    return c * low * l1 + 3.0 * math.exp(-2.0 * mu_tilde(R) * t) * l2


def gt_line_ptilde_envelope(t: float, y0_L1_sq: float, y0_L2_sq: float) -> EnvelopeSample:
    if t < 0:
        raise ValueError("t must be nonnegative")
    lo, hi = GT_R_BRACKET[0], XI1
    R, v = scan_golden_min(lambda r: _gt_ptilde_objective(t, r, y0_L1_sq, y0_L2_sq), lo, hi,
                           iters=GOLDEN_ITERS)
    edge = abs(math.log(R / lo)) < 1e-6 or abs(math.log(hi / R)) < 1e-6
    return EnvelopeSample(t, v, R, edge)


def gt_line_ptilde_bound(t: float, y0_L1_sq: float, y0_L2_sq: float) -> float:
    return gt_line_ptilde_envelope(t, y0_L1_sq, y0_L2_sq).bound


# ---------------------------------------------------------------------------
# Small torus
# ---------------------------------------------------------------------------

def _C_tilde(s: float) -> float:
    return norm_constant(s, delta2_tilde(s))


@functools.lru_cache(maxsize=1)
def _C_tilde_peak() -> tuple:
    # C rises from 1 at s = 0 to a single peak near s = 0.4, then decays to 1
    s, v = scan_golden_min(lambda z: -_C_tilde(z), 1e-3, 1e3, iters=80, points=121)
    return s, -v


def _sup_C_tilde(s: float) -> float:
    peak, cmax = _C_tilde_peak()
    return cmax if s <= peak else _C_tilde(s)


def _first_s(pred, hi: float = 1e12) -> float:
    """Smallest ``s`` (to bisection accuracy) from which ``pred`` holds."""
    lo = 1e-6
    if pred(lo):
        return lo
    if not pred(hi):
        return math.inf
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if hi / lo < 1.0 + 1e-12:
            break
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def torus_L_eps(eps: float) -> float:
    """Largest ``L`` for which the small-torus statement holds with this ``eps``."""
    if not 0 < eps < LAMBDA_STAR_LOWER:
        raise EpsTooLarge(f"eps must lie in (0, {LAMBDA_STAR_LOWER:.6f})")
    target = LAMBDA_STAR_LOWER - eps
    s_rate = _first_s(lambda s: lambda2_tilde(s) >= target)
    s_const = _first_s(lambda s: _sup_C_tilde(s) <= 1.0 + eps)
    return 2.0 * math.pi / max(s_rate, s_const)


def torus_small_L_rate(L: float, eps: float) -> tuple:
    """``(rate, mult_const)`` for the torus of side ``L``.

    For ``L <= L_eps`` this is ``(min(2, lambda_star - eps), 1 + eps)`` with
    ``lambda_star`` replaced by its lower bound ``1 - sqrt(3/7)``; for larger
    ``L`` the lowest nonzero mode ``2 pi / L`` decides (the rate is kept at or
    below the small-L value).
    """
    if not L > 0:
        raise ValueError("L must be positive")
    L_eps = torus_L_eps(eps)
    if L <= L_eps:
        return min(2.0, LAMBDA_STAR_LOWER - eps), 1.0 + eps
    s = 2.0 * math.pi / L
    # capped at the small-L rate so the rate stays monotone in L across L_eps
    rate = min(2.0, LAMBDA_STAR_LOWER - eps, float(lambda2_tilde(s)))
    return rate, float(_sup_C_tilde(s))
