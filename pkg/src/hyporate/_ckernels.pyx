# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see ``_pykernels`` for the reference)."""

from libc.math cimport sqrt, exp, cos, sin, fabs, INFINITY, NAN

import numpy as np

cdef double SQRT3 = sqrt(3.0)
cdef double TRIANGLE_MARGIN = 1e-12

H1, H2, H2_TILDE, H3, DIFFUSION = 0, 1, 2, 3, 4


cdef int _params(int variant, double lam, double s, double eps,
                 double* alpha, double* p, double* a, double* b,
                 double* q, double* dmax) noexcept nogil:
    cdef double s2 = s * s
    cdef double k, m, e2
    if variant == 0:
        k = s2 / (1.0 + s2)
        alpha[0] = s * (1.0 + SQRT3 * s) / (1.0 + s2) + 0.5 * lam
        p[0] = 1.0 - 0.5 * lam; a[0] = 1.0; b[0] = k; q[0] = 0.5 * lam; dmax[0] = 1.0
    elif variant == 1:
        k = s2 / (1.0 + s2)
        alpha[0] = s * (1.0 + SQRT3 * s + lam) / (1.0 + s2)
        p[0] = 1.0 - 0.5 * lam; a[0] = k; b[0] = k; q[0] = 0.5 * lam; dmax[0] = (1.0 + s2) / s2
    elif variant == 2:
        k = s2 / (1.0 + s2)
        m = 0.5 * lam * s / (1.0 + s2)
        alpha[0] = s * (1.0 + SQRT3 * s) / (1.0 + s2)
        p[0] = 1.0 - 0.5 * lam; a[0] = k + m; b[0] = k - m; q[0] = 0.5 * lam
        dmax[0] = (1.0 + s2) / s2
    elif variant == 3:
        e2 = eps * eps
        k = s2 / (e2 + s2)
        alpha[0] = s * (1.0 + SQRT3 * s + lam) / (e2 + s2)
        p[0] = 1.0 - 0.5 * lam; a[0] = k; b[0] = k; q[0] = 0.5 * lam; dmax[0] = 1.0 + e2 / s2
    elif variant == 4:
        k = s2 / (1.0 + s2)
        alpha[0] = (s / eps) * (1.0 + SQRT3 * eps * s + lam * eps * eps) / (1.0 + s2)
        p[0] = 1.0 / eps - 0.5 * lam * eps; a[0] = k; b[0] = k; q[0] = 0.5 * lam * eps
        dmax[0] = INFINITY
    else:
        return -1
    return 0


cdef inline double _h(double alpha, double p, double a, double b, double q, double d) noexcept nogil:
    return (alpha * d) * (alpha * d) - 4.0 * (p - a * d) * (b * d - q)


cdef double _min_over_delta(int variant, double lam, double s, double eps,
                            double* arg) noexcept nogil:
    cdef double alpha, p, a, b, q, dmax, lo, hi, best, best_d, quad, v, hv, hh
    _params(variant, lam, s, eps, &alpha, &p, &a, &b, &q, &dmax)
    arg[0] = NAN
    if p <= 0.0:
        return INFINITY
    if a > 0.0:
        hi = p / a
        if dmax < hi:
            hi = dmax
    else:
        hi = dmax
    lo = TRIANGLE_MARGIN * (hi if hi < 1.0 else 1.0)
    hi = hi - TRIANGLE_MARGIN * (hi if hi > 1.0 else 1.0)
    if not hi > lo:
        return INFINITY
    best_d = lo
    best = _h(alpha, p, a, b, q, lo)
    quad = alpha * alpha + 4.0 * a * b
    if quad > 0.0:
        v = 2.0 * (p * b + a * q) / quad
        if lo < v < hi:
            hv = _h(alpha, p, a, b, q, v)
            if hv < best:
                best = hv
                best_d = v
    hh = _h(alpha, p, a, b, q, hi)
    if hh < best:
        best = hh
        best_d = hi
    arg[0] = best_d
    return best


def disc_value(int variant, double delta, double lam, double s, double eps):
    cdef double alpha, p, a, b, q, dmax
    if _params(variant, lam, s, eps, &alpha, &p, &a, &b, &q, &dmax) != 0:
        raise ValueError(f"unknown variant code {variant}")
    return _h(alpha, p, a, b, q, delta)


def min_over_delta(int variant, double lam, double s, double eps):
    cdef double arg
    cdef double val
    if variant < 0 or variant > 4:
        raise ValueError(f"unknown variant code {variant}")
    val = _min_over_delta(variant, lam, s, eps, &arg)
    return val, arg


def max_rate(int variant, double s, double eps, int iters):
    cdef double lo = 0.0, hi = 2.0, mid, cap, arg
    cdef int i
    if variant < 0 or variant > 4:
        raise ValueError(f"unknown variant code {variant}")
    with nogil:
        if variant == 4:
            cap = 2.0 / (eps * eps)
            hi = 1.0
            while hi < cap and _min_over_delta(variant, hi, s, eps, &arg) <= 0.0:
                hi = 2.0 * hi
                if hi > cap:
                    hi = cap
        for i in range(iters):
            mid = 0.5 * (lo + hi)
            if _min_over_delta(variant, mid, s, eps, &arg) <= 0.0:
                lo = mid
            else:
                hi = mid
    if lo == 0.0:
        return 0.0, float("nan")
    _min_over_delta(variant, lo, s, eps, &arg)
    return lo, arg


cdef void _expm_entries(double xi, double sigma, double t,
                        double* ar, double* bi, double* dr) noexcept nogil:
    # exp(-Ct) = [[ar, i*bi], [i*bi, dr]] for C = [[0, i xi], [i xi, sigma]]
    cdef double m = 0.5 * sigma
    cdef double q2 = 0.25 * sigma * sigma - xi * xi
    cdef double z = sqrt(fabs(q2)) * t
    cdef double z2, e, ech, ets, ep, em
    if z < 1e-3:
        z2 = z * z if q2 >= 0.0 else -z * z
        e = exp(-m * t)
        ech = e * (1.0 + z2 / 2.0 * (1.0 + z2 / 12.0 * (1.0 + z2 / 30.0)))
        ets = e * t * (1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0)))
    elif q2 >= 0.0:
        ep = exp(z - m * t)
        em = exp(-z - m * t)
        ech = 0.5 * (ep + em)
        ets = t * 0.5 * (ep - em) / z
    else:
        e = exp(-m * t)
        ech = e * cos(z)
        ets = e * t * sin(z) / z
    ar[0] = ech + ets * m
    bi[0] = -ets * xi
    dr[0] = ech - ets * m


def propagate(xi, double sigma, double t, y0):
    cdef double[::1] x = np.ascontiguousarray(xi, dtype=np.float64)
    yin = np.ascontiguousarray(y0, dtype=np.complex128)
    cdef double[:, ::1] y = yin.view(np.float64).reshape(yin.shape[0], 4)
    res = np.empty((x.shape[0], 2), dtype=np.complex128)
    cdef double[:, ::1] o = res.view(np.float64).reshape(x.shape[0], 4)
    cdef Py_ssize_t k, n = x.shape[0]
    cdef double ar, bi, dr, ur, ui, vr, vi
    with nogil:
        for k in range(n):
            _expm_entries(x[k], sigma, t, &ar, &bi, &dr)
            ur = y[k, 0]; ui = y[k, 1]; vr = y[k, 2]; vi = y[k, 3]
            # (ar u + i bi v, i bi u + dr v)
            o[k, 0] = ar * ur - bi * vi
            o[k, 1] = ar * ui + bi * vr
            o[k, 2] = -bi * ui + dr * vr
            o[k, 3] = bi * ur + dr * vi
    return res


def hplus(xi, double sigma, double t):
    cdef double[::1] x = np.ascontiguousarray(xi, dtype=np.float64)
    res = np.empty(x.shape[0], dtype=np.float64)
    cdef double[::1] o = res
    cdef Py_ssize_t k, n = x.shape[0]
    cdef double ar, bi, dr, fro, disc
    cdef double det = exp(-2.0 * sigma * t)
    with nogil:
        for k in range(n):
            _expm_entries(x[k], sigma, t, &ar, &bi, &dr)
            fro = ar * ar + 2.0 * bi * bi + dr * dr
            disc = fro * fro - 4.0 * det
            if disc < 0.0:
                disc = 0.0
            o[k] = 0.5 * (fro + sqrt(disc))
    return res


cdef inline double _mu_line(double s) noexcept nogil:
    cdef double r = 1.0 - 4.0 * s * s
    if r <= 0.0:
        return 0.5
    return 2.0 * s * s / (1.0 + sqrt(r))


cdef inline double _b_integrand(double s, double t) noexcept nogil:
    return exp(-2.0 * _mu_line(s) * t)


cdef double _simpson(double a, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth, double t) noexcept nogil:
    cdef double m = 0.5 * (a + b)
    cdef double lm = 0.5 * (a + m)
    cdef double rm = 0.5 * (m + b)
    cdef double flm = _b_integrand(lm, t)
    cdef double frm = _b_integrand(rm, t)
    cdef double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    cdef double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    cdef double delta = left + right - whole
    if depth <= 0 or fabs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return (_simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, t)
            + _simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, t))


def gt_B_integral(double t, double R, double tol):
    cdef double fa, fm, fb, whole, val
    if R <= 0.0:
        return 0.0
    with nogil:
        fa = _b_integrand(0.0, t)
        fm = _b_integrand(0.5 * R, t)
        fb = _b_integrand(R, t)
        whole = R / 6.0 * (fa + 4.0 * fm + fb)
        val = _simpson(0.0, R, fa, fm, fb, whole, tol, 40, t)
    return sqrt(t) * val
