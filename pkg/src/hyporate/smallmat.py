"""Dense complex linear algebra for small matrices (dimension <= 16).

Everything here is written against plain numpy arrays and deliberately avoids
``numpy.linalg``: Hermitian spectra come from cyclic Jacobi rotations, general
spectra from a Hessenberg reduction followed by shifted QR, and 2x2 problems use
closed forms.  Matrices are ordinary ``complex128`` arrays of shape ``(n, n)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotHermitian, NotPositiveDefinite

MAX_DIM = 16
HERMIT_TOL = 1e-10
PD_TOL = 1e-10
EIG_TOL = 1e-10
CLUSTER_RADIUS = 1e-8
RANK_TOL = 1e-8

_EPS = np.finfo(float).eps


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a square complex array, checking its shape."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def inf_norm(a) -> float:
    return float(np.max(np.sum(np.abs(a), axis=1)))


def is_hermitian(a, tol: float = HERMIT_TOL) -> bool:
    a = as_matrix(a)
    return inf_norm(a - a.conj().T) <= tol * max(inf_norm(a), 1.0)


def is_anti_hermitian(a, tol: float = HERMIT_TOL) -> bool:
    a = as_matrix(a)
    return inf_norm(a + a.conj().T) <= tol * max(inf_norm(a), 1.0)


def hermitian_part(a) -> np.ndarray:
    a = as_matrix(a)
    return 0.5 * (a + a.conj().T)


def anti_hermitian_part(a) -> np.ndarray:
    a = as_matrix(a)
    return 0.5 * (a - a.conj().T)


@dataclass(frozen=True)
class EigenResult:
    values: tuple
    defect_flags: tuple

    @property
    def any_defective(self) -> bool:
        return any(self.defect_flags)


# ---------------------------------------------------------------------------
# Hermitian eigenproblem
# ---------------------------------------------------------------------------

def _jacobi_hermitian(a: np.ndarray, want_vectors: bool, max_sweeps: int = 60):
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex) if want_vectors else None
    scale = max(float(np.sqrt(np.sum(np.abs(a) ** 2))), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = float(np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2)))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] acting on (p, q)
                gpp, gpq = c, s
                gqp, gqq = -s * phase.conjugate(), c * phase.conjugate()
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = colp * gpp + colq * gqp
                a[:, q] = colp * gpq + colq * gqq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = np.conj(gpp) * rowp + np.conj(gqp) * rowq
                a[q, :] = np.conj(gpq) * rowp + np.conj(gqq) * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                if v is not None:
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = vp * gpp + vq * gqp
                    v[:, q] = vp * gpq + vq * gqq
    else:
        raise NoConvergence("Jacobi sweeps did not converge")
    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    if v is None:
        return w[order], None
    return w[order], v[:, order]


def _eig_hermitian_2x2(a: np.ndarray) -> np.ndarray:
    p = a[0, 0].real
    q = a[1, 1].real
    b = abs(a[0, 1])
    mid = 0.5 * (p + q)
    rad = math.hypot(0.5 * (p - q), b)
    return np.array([mid - rad, mid + rad])


def eig_hermitian(a, vectors: bool = False):
    """Ascending real spectrum of a Hermitian matrix.

    With ``vectors=True`` also return the unitary matrix of eigenvectors (by
    columns), so that ``a == v @ diag(w) @ v.conj().T`` up to rounding.
    """
    a = as_matrix(a)
    if not is_hermitian(a):
        raise NotHermitian("matrix is not Hermitian within hermit_tol")
    a = hermitian_part(a)
    if a.shape[0] == 1:
        w = np.array([a[0, 0].real])
        return (w, np.ones((1, 1), dtype=complex)) if vectors else w
    if a.shape[0] == 2 and not vectors:
        return _eig_hermitian_2x2(a)
    w, v = _jacobi_hermitian(a, want_vectors=vectors)
    return (w, v) if vectors else w


def condition_number(p) -> float:
    """Ratio of the extreme eigenvalues of a Hermitian positive definite matrix."""
    w = eig_hermitian(p)
    if w[0] <= PD_TOL * max(abs(w[-1]), 1.0):
        raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3e} is not positive")
    return float(w[-1] / w[0])


def operator_norm_sq(m) -> float:
    """Largest eigenvalue of ``m* m`` (squared spectral norm)."""
    m = as_matrix(m)
    if m.shape[0] == 2:
        fro = float(np.sum(np.abs(m) ** 2))
        det = abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
        disc = max(fro * fro - 4.0 * det * det, 0.0)
        return 0.5 * (fro + math.sqrt(disc))
    return float(eig_hermitian(m.conj().T @ m)[-1])


# ---------------------------------------------------------------------------
# General eigenproblem
# ---------------------------------------------------------------------------

def _hessenberg(a: np.ndarray) -> np.ndarray:
    h = a.copy()
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = math.sqrt(float(np.sum(np.abs(x) ** 2)))
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        u = x.copy()
        u[0] += phase * alpha
        unorm = math.sqrt(float(np.sum(np.abs(u) ** 2)))
        if unorm == 0.0:
            continue
        u /= unorm
        h[k + 1:, :] -= 2.0 * np.outer(u, u.conj() @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ u, u.conj())
    return h


def _givens(a: complex, b: complex) -> np.ndarray:
    r = math.hypot(abs(a), abs(b))
    if r == 0.0:
        return np.eye(2, dtype=complex)
    return np.array([[a.conjugate() / r, b.conjugate() / r], [-b / r, a / r]])


def _eig2_closed(a, b, c, d):
    half_tr = 0.5 * (a + d)
    det = a * d - b * c
    root = cmath.sqrt(half_tr * half_tr - det)
    return half_tr + root, half_tr - root


def _shifted_qr_eigenvalues(a: np.ndarray, max_iters: int) -> list:
    h = _hessenberg(a)
    n = h.shape[0]
    norm = max(float(np.max(np.abs(h))), np.finfo(float).tiny)
    eigs = []
    hi = n - 1
    total = 0
    since_deflation = 0
    while hi >= 0:
        if hi == 0:
            eigs.append(complex(h[0, 0]))
            break
        l = hi
        while l > 0:
            tiny = _EPS * (abs(h[l, l]) + abs(h[l - 1, l - 1]))
            if tiny == 0.0:
                tiny = _EPS * norm
            if abs(h[l, l - 1]) <= tiny:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            eigs.append(complex(h[hi, hi]))
            hi -= 1
            since_deflation = 0
            continue
        if l == hi - 1:
            e1, e2 = _eig2_closed(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
            eigs.extend([e1, e2])
            hi -= 2
            since_deflation = 0
            continue
        total += 1
        since_deflation += 1
        if total > max_iters:
            raise NoConvergence(f"shifted QR exceeded {max_iters} iterations")
        e1, e2 = _eig2_closed(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        shift = e1 if abs(e1 - h[hi, hi]) <= abs(e2 - h[hi, hi]) else e2
        if since_deflation % 11 == 10:
            shift = h[hi, hi] + abs(h[hi, hi - 1])
        block = h[l:hi + 1, l:hi + 1] - shift * np.eye(hi - l + 1)
        m = block.shape[0]
        rots = []
        for k in range(m - 1):
            g = _givens(block[k, k], block[k + 1, k])
            block[k:k + 2, k:] = g @ block[k:k + 2, k:]
            rots.append(g)
        for k, g in enumerate(rots):
            block[:k + 2, k:k + 2] = block[:k + 2, k:k + 2] @ g.conj().T
        h[l:hi + 1, l:hi + 1] = block + shift * np.eye(m)
    return eigs


def _numeric_rank(m: np.ndarray, tol: float) -> int:
    """Rank by Gaussian elimination with complete pivoting."""
    m = m.copy()
    rows, cols = m.shape
    rank = 0
    for k in range(min(rows, cols)):
        sub = np.abs(m[k:, k:])
        i, j = np.unravel_index(int(np.argmax(sub)), sub.shape)
        piv = sub[i, j]
        if piv <= tol:
            break
        i += k
        j += k
        m[[k, i], :] = m[[i, k], :]
        m[:, [k, j]] = m[:, [j, k]]
        m[k + 1:, k:] -= np.outer(m[k + 1:, k] / m[k, k], m[k, k:])
        rank += 1
    return rank


def _defect_flags(a: np.ndarray, values: list) -> list:
    n = a.shape[0]
    norm = inf_norm(a)
    radius = CLUSTER_RADIUS * max(1.0, norm)
    flags = [False] * n
    seen = [False] * n
    for i in range(n):
        if seen[i]:
            continue
        cluster = [j for j in range(n) if not seen[j] and abs(values[j] - values[i]) <= radius]
        for j in cluster:
            seen[j] = True
        if len(cluster) < 2:
            continue
        centre = sum(values[j] for j in cluster) / len(cluster)
        geometric = n - _numeric_rank(a - centre * np.eye(n), RANK_TOL * norm)
        if geometric < len(cluster):
            for j in cluster:
                flags[j] = True
    return flags


def eig_general(a) -> EigenResult:
    """Eigenvalues of a general complex matrix with per-eigenvalue defect flags."""
    a = as_matrix(a)
    n = a.shape[0]
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    if n == 1:
        values = [complex(a[0, 0])]
    elif n == 2:
        values = list(_eig2_closed(a[0, 0], a[0, 1], a[1, 0], a[1, 1]))
    else:
        values = _shifted_qr_eigenvalues(a, max_iters=200 * n)
    values = [complex(v) for v in values]
    order = sorted(range(n), key=lambda k: (round(values[k].real, 12), values[k].imag))
    values = [values[k] for k in order]
    flags = _defect_flags(a, values)
    return EigenResult(tuple(values), tuple(flags))


def solve(a, b) -> np.ndarray:
    """Solve ``a x = b`` by Gaussian elimination with partial pivoting."""
    a = as_matrix(a).copy()
    x = np.array(b, dtype=complex).copy()
    n = a.shape[0]
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if a[piv, k] == 0:
            raise ValueError("singular matrix")
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            x[[k, piv]] = x[[piv, k]]
        f = a[k + 1:, k] / a[k, k]
        a[k + 1:, k:] -= np.outer(f, a[k, k:])
        x[k + 1:] -= np.outer(f, x[k]).reshape(x[k + 1:].shape) if x.ndim > 1 else f * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x


# ---------------------------------------------------------------------------
# 2x2 matrix exponential
# ---------------------------------------------------------------------------

def _cosh_sinhc(z: complex):
    """Return (cosh z, sinh(z)/z) without cancellation for small |z|."""
    if abs(z) < 1e-3:
        z2 = z * z
        ch = 1 + z2 / 2 * (1 + z2 / 12 * (1 + z2 / 30))
        sc = 1 + z2 / 6 * (1 + z2 / 20 * (1 + z2 / 42))
        return ch, sc
    return cmath.cosh(z), cmath.sinh(z) / z


def expm_2x2(c, t: float) -> np.ndarray:
    """Propagator ``exp(-C t)`` of a 2x2 matrix in closed form.

    With ``m = tr(C)/2`` and ``B = C - m I`` one has ``B^2 = q^2 I``, hence
    ``exp(-C t) = exp(-m t) (cosh(q t) I - t sinhc(q t) B)``.  For ``q = 0``
    (double, defective eigenvalue ``m``) this is ``exp(-m t)(I - t (C - m I))``.
    """
    c = as_matrix(c)
    if c.shape != (2, 2):
        raise ValueError("expm_2x2 needs a 2x2 matrix")
    if t < 0:
        raise ValueError("t must be nonnegative")
    m = 0.5 * (c[0, 0] + c[1, 1])
    b = c - m * np.eye(2)
    q2 = b[0, 0] * b[0, 0] + b[0, 1] * b[1, 0]
    q = cmath.sqrt(q2)
    ch, sc = _cosh_sinhc(q * t)
    return cmath.exp(-m * t) * (ch * np.eye(2) - (t * sc) * b)


def cholesky(p) -> np.ndarray:
    """Lower-triangular ``L`` with ``p = L L*`` for Hermitian positive definite ``p``."""
    p = hermitian_part(p)
    n = p.shape[0]
    low = np.zeros_like(p)
    for j in range(n):
        d = p[j, j].real - float(np.sum(np.abs(low[j, :j]) ** 2))
        if not d > 0:
            raise NotPositiveDefinite("Cholesky pivot is not positive")
        low[j, j] = math.sqrt(d)
        for i in range(j + 1, n):
            low[i, j] = (p[i, j] - low[i, :j] @ low[j, :j].conj()) / low[j, j]
    return low


def lower_solve(low, b) -> np.ndarray:
    """Forward substitution for lower-triangular ``low``."""
    low = np.asarray(low)
    x = np.array(b, dtype=complex)
    for i in range(low.shape[0]):
        x[i] = (x[i] - low[i, :i] @ x[:i]) / low[i, i]
    return x


def eigenspace(a, value: complex, dim: int = 1, iters: int = 4) -> np.ndarray:
    """Orthonormal basis (columns) of the eigenspace of ``a`` for ``value``.

    Subspace inverse iteration with a tiny shift; ``dim`` is the expected
    geometric multiplicity.
    """
    a = as_matrix(a)
    n = a.shape[0]
    shift = value + 1e-11 * max(1.0, inf_norm(a))
    m = a - shift * np.eye(n)
    rng = np.random.default_rng(20240611)
    x = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    for _ in range(iters):
        x = np.column_stack([solve(m, x[:, j]) for j in range(dim)])
        x = _gram_schmidt(x)
    return x


def _gram_schmidt(x: np.ndarray) -> np.ndarray:
    q = np.array(x, dtype=complex)
    for j in range(q.shape[1]):
        for _ in range(2):
            for i in range(j):
                q[:, j] -= (q[:, i].conj() @ q[:, j]) * q[:, i]
        q[:, j] /= math.sqrt(float(np.sum(np.abs(q[:, j]) ** 2)))
    return q
