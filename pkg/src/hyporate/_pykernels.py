"""Pure-Python reference implementation of the hot kernels.

``_ckernels.pyx`` implements the same functions with identical signatures and
the same algorithms; ``kernels`` picks one at import time.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

SQRT3 = math.sqrt(3.0)

# variant codes shared with the compiled module
H1, H2, H2_TILDE, H3, DIFFUSION = 0, 1, 2, 3, 4

TRIANGLE_MARGIN = 1e-12


def disc_params(variant: int, lam: float, s: float, eps: float):
    """Coefficients of a mode discriminant written as

        h(delta) = (alpha delta)^2 - 4 (P - a delta)(b delta - Q)

    together with the triangle bound ``delta < dmax``.
    """
    s2 = s * s
    if variant == H1:
        k = s2 / (1.0 + s2)
        alpha = s * (1.0 + SQRT3 * s) / (1.0 + s2) + 0.5 * lam
        return alpha, 1.0 - 0.5 * lam, 1.0, k, 0.5 * lam, 1.0
    if variant == H2:
        k = s2 / (1.0 + s2)
        alpha = s * (1.0 + SQRT3 * s + lam) / (1.0 + s2)
        return alpha, 1.0 - 0.5 * lam, k, k, 0.5 * lam, (1.0 + s2) / s2
    if variant == H2_TILDE:
        k = s2 / (1.0 + s2)
        m = 0.5 * lam * s / (1.0 + s2)
        alpha = s * (1.0 + SQRT3 * s) / (1.0 + s2)
        return alpha, 1.0 - 0.5 * lam, k + m, k - m, 0.5 * lam, (1.0 + s2) / s2
    if variant == H3:
        e2 = eps * eps
        k = s2 / (e2 + s2)
        alpha = s * (1.0 + SQRT3 * s + lam) / (e2 + s2)
        return alpha, 1.0 - 0.5 * lam, k, k, 0.5 * lam, 1.0 + e2 / s2
    if variant == DIFFUSION:
        k = s2 / (1.0 + s2)
        alpha = (s / eps) * (1.0 + SQRT3 * eps * s + lam * eps * eps) / (1.0 + s2)
        p = 1.0 / eps - 0.5 * lam * eps
        return alpha, p, k, k, 0.5 * lam * eps, math.inf
    raise ValueError(f"unknown variant code {variant}")


def disc_value(variant: int, delta: float, lam: float, s: float, eps: float) -> float:
    alpha, p, a, b, q, _ = disc_params(variant, lam, s, eps)
    return (alpha * delta) ** 2 - 4.0 * (p - a * delta) * (b * delta - q)


def min_over_delta(variant: int, lam: float, s: float, eps: float):
    """Minimum of the discriminant over the admissible delta interval.

    Returns ``(h_min, delta_argmin)``; ``h_min = inf`` when the interval is empty.
    """
    alpha, p, a, b, q, dmax = disc_params(variant, lam, s, eps)
    if p <= 0.0:
        return math.inf, math.nan
    hi = min(dmax, p / a) if a > 0 else dmax
    lo = TRIANGLE_MARGIN * min(1.0, hi)
    hi = hi - TRIANGLE_MARGIN * max(1.0, hi)
    if not hi > lo:
        return math.inf, math.nan

    def h(d):
        return (alpha * d) ** 2 - 4.0 * (p - a * d) * (b * d - q)

    best_d = lo
    best = h(lo)
    quad = alpha * alpha + 4.0 * a * b
    if quad > 0.0:
        v = 2.0 * (p * b + a * q) / quad
        if lo < v < hi:
            hv = h(v)
            if hv < best:
                best, best_d = hv, v
    hh = h(hi)
    if hh < best:
        best, best_d = hh, hi
    return best, best_d


def max_rate(variant: int, s: float, eps: float, iters: int):
    """Largest lambda admitting a feasible delta, by bisection on lambda.

    Returns ``(lambda, delta)``; ``lambda = 0`` signals an empty feasible set.
    """
    lo, hi = 0.0, 2.0
    if variant == DIFFUSION:
        cap = 2.0 / (eps * eps)
        hi = 1.0
        while hi < cap and min_over_delta(variant, hi, s, eps)[0] <= 0.0:
            hi = min(2.0 * hi, cap)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if min_over_delta(variant, mid, s, eps)[0] <= 0.0:
            lo = mid
        else:
            hi = mid
    if lo == 0.0:
        return 0.0, math.nan
    return lo, min_over_delta(variant, lo, s, eps)[1]


def _expm_entries(xi: float, sigma: float, t: float):
    # exp(-C t) for C = [[0, i xi], [i xi, sigma]]; B = C - (sigma/2) I
    m = 0.5 * sigma
    q2 = 0.25 * sigma * sigma - xi * xi
    z = math.sqrt(abs(q2)) * t
    if z < 1e-3:
        z2 = z * z if q2 >= 0.0 else -z * z
        e = math.exp(-m * t)
        ech = e * (1.0 + z2 / 2.0 * (1.0 + z2 / 12.0 * (1.0 + z2 / 30.0)))
        ets = e * t * (1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0)))
    elif q2 >= 0.0:
        # fold exp(-m t) into the exponentials so cosh never overflows
        ep = math.exp(z - m * t)
        em = math.exp(-z - m * t)
        ech = 0.5 * (ep + em)
        ets = t * 0.5 * (ep - em) / z
    else:
        e = math.exp(-m * t)
        ech = e * math.cos(z)
        ets = e * t * math.sin(z) / z
    # exp(-Ct) = e (ch I - ts B), B = [[-m, i xi], [i xi, m]]
    return ech + ets * m, -1j * ets * xi, -1j * ets * xi, ech - ets * m


def propagate(xi, sigma: float, t: float, y0):
    """Apply exp(-C(xi, sigma) t) to each row ``y0[k] = (u_hat, v_hat)``."""
    xi = np.asarray(xi, dtype=float)
    y0 = np.asarray(y0, dtype=complex)
    out = np.empty_like(y0)
    for k in range(xi.shape[0]):
        a, b, c, d = _expm_entries(float(xi[k]), sigma, t)
        u, v = y0[k, 0], y0[k, 1]
        out[k, 0] = a * u + b * v
        out[k, 1] = c * u + d * v
    return out


def hplus(xi, sigma: float, t: float):
    """Squared spectral norm of exp(-C(xi, sigma) t) for each xi."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty(xi.shape[0])
    det = math.exp(-2.0 * sigma * t)  # |det exp(-Ct)|^2
    for k in range(xi.shape[0]):
        a, b, c, d = _expm_entries(float(xi[k]), sigma, t)
        fro = abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 + abs(d) ** 2
        disc = fro * fro - 4.0 * det
        out[k] = 0.5 * (fro + math.sqrt(disc if disc > 0.0 else 0.0))
    return out


def _mu_line(s: float) -> float:
    # slow gap on the line at sigma = 1, written without cancellation
    r = 1.0 - 4.0 * s * s
    if r <= 0.0:
        return 0.5
    return 2.0 * s * s / (1.0 + math.sqrt(r))


def gt_B_integral(t: float, R: float, tol: float) -> float:
    """sqrt(t) * int_0^R exp(-2 mu(s) t) ds by adaptive Simpson."""
    from ._numerics import adaptive_simpson

    if R <= 0.0:
        return 0.0
    val = adaptive_simpson(lambda s: math.exp(-2.0 * _mu_line(s) * t), 0.0, R, tol, 40)
    return math.sqrt(t) * val
