"""Scalar quadrature and 1-D minimization shared by the rate and bound modules."""

from __future__ import annotations

import math

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 40,
                     rel: float = 0.0) -> float:
    """Adaptive Simpson quadrature.

    The error target is ``max(tol, rel * |I|)`` with ``|I|`` taken from the
    first Simpson estimate.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth, rel)
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    tol = max(tol, rel * abs(whole))
    # explicit stack instead of recursion: (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, max_depth)]
    total = 0.0
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            stack.append((a, m, fa, flm, fm, left, 0.5 * eps, depth - 1))
            stack.append((m, b, fm, frm, fb, right, 0.5 * eps, depth - 1))
    return total


def golden_min(f, lo: float, hi: float, iters: int = 60, log_scale: bool = False):
    """Golden-section minimization of a unimodal ``f`` on ``[lo, hi]``.

    With ``log_scale`` the search runs in ``log x`` (both ends must be positive).
    Returns ``(x, f(x))``.
    """
    if log_scale:
        if lo <= 0 or hi <= 0:
            raise ValueError("log-scale search needs a positive bracket")
        g = lambda z: f(math.exp(z))  # noqa: E731
        z, v = golden_min(g, math.log(lo), math.log(hi), iters, False)
        return math.exp(z), v
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    best = min((fc, c), (fd, d), (f(lo), lo), (f(hi), hi))
    return best[1], best[0]


def bisect_root(f, lo: float, hi: float, iters: int = 200, xtol: float = 0.0) -> float:
    """Bisection for a sign change of ``f`` on ``[lo, hi]``."""
    flo = f(lo)
    if flo == 0:
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi) or hi - lo <= xtol:
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def geomspace(lo: float, hi: float, n: int) -> list:
    if n == 1:
        return [lo]
    r = math.log(hi / lo) / (n - 1)
    return [lo * math.exp(k * r) for k in range(n)]


def scan_golden_min(f, lo: float, hi: float, iters: int = 60, points: int = 48,
                    log_scale: bool = True):
    """Global-ish minimization: coarse grid scan, then golden section in the best cell.

    Objectives with a boundary minimum and an interior minimum (as in the
    frequency-split bounds) defeat a plain golden search; the scan picks the
    basin first.  Returns ``(x, f(x))``.
    """
    grid = geomspace(lo, hi, points) if log_scale else [lo + (hi - lo) * k / (points - 1) for k in range(points)]
    vals = [f(x) for x in grid]
    j = min(range(points), key=lambda k: vals[k])
    a = grid[max(j - 1, 0)]
    b = grid[min(j + 1, points - 1)]
    x, v = golden_min(f, a, b, iters=iters, log_scale=log_scale)
    if vals[j] < v:
        return grid[j], vals[j]
    return x, v
