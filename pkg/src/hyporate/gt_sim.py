"""Exact modal simulation of the Goldstein-Taylor system on the torus and the line.

In Fourier variables each mode obeys ``d/dt y = -C(xi, sigma) y`` with
``C = [[0, i xi], [i xi, sigma]]``, so the solution is a product of 2x2
propagators.  Torus fields hold normalized coefficients
``(1/2pi) int exp(-i xi x) f dx`` and ``|y|^2`` is the normalized ``L^2`` norm
``(1/2pi) int (u^2 + v^2) dx``.  Line fields hold samples of the unnormalized
transform on a symmetric grid and ``|y|^2 = (1/2pi) int |y_hat|^2 dxi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from . import smallmat as sm
from ._parallel import pmap
from .spectral_lyapunov import DecayCertificate, gt_matrix

PASS_TOL = 1e-6
TORUS_N = 64
LINE_XI_MAX = 16.0
LINE_H = 1.0 / 512.0
PER_DECADE = 200
ANGLE_GRID = 720
PRESETS = ("cosine", "gaussian_modes", "worst_case")


@dataclass(frozen=True)
class ModalState:
    xi: float
    uv_hat: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.uv_hat, dtype=complex)
        if y.shape != (2,):
            raise ValueError("uv_hat must be a complex 2-vector")
        object.__setattr__(self, "uv_hat", y)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.uv_hat) ** 2))


@dataclass(frozen=True)
class TorusField:
    """Modes ``-N..N``; row ``k`` of ``y_hat`` is ``(u_hat, v_hat)`` at ``xi = k - N``."""

    N: int
    y_hat: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y_hat, dtype=complex)
        if y.shape != (2 * self.N + 1, 2):
            raise ValueError(f"expected shape {(2 * self.N + 1, 2)}, got {y.shape}")
        object.__setattr__(self, "y_hat", y)

    @property
    def xi(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1, dtype=float)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.y_hat) ** 2))

    @property
    def mean_u(self) -> complex:
        return complex(self.y_hat[self.N, 0])

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.y_hat - np.conj(self.y_hat[::-1]))) <= tol * max(1.0, np.max(np.abs(self.y_hat))))

    @classmethod
    def from_spatial(cls, u, v, N: int = TORUS_N) -> "TorusField":
        """Coefficients of real samples of ``u, v`` on ``n`` equispaced points of ``[0, 2pi)``."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        n = u.shape[0]
        if v.shape != u.shape or n < 2 * N + 1:
            raise ValueError("need matching samples with at least 2N+1 points")
        uh, vh = np.fft.fft(u) / n, np.fft.fft(v) / n
        k = np.arange(-N, N + 1)
        return cls(N, np.column_stack([uh[k], vh[k]]))

    def to_spatial(self, n: int = 2048):
        """Samples of ``(u, v)`` on ``n`` equispaced points of ``[0, 2pi)``."""
        if n < 2 * self.N + 1:
            raise ValueError("grid too coarse for the represented modes")
        full = np.zeros((n, 2), dtype=complex)
        full[np.arange(-self.N, self.N + 1) % n] = self.y_hat
        out = np.fft.ifft(full, axis=0) * n
        return np.real(out[:, 0]), np.real(out[:, 1])

    def spatial_norm_sq(self, n: int = 2048) -> float:
        u, v = self.to_spatial(n)
        return float(np.mean(u * u + v * v))


@dataclass(frozen=True)
class LineField:
    """Samples ``y_hat(xi_j)`` with ``xi_j = j h``, ``|j| <= xi_max / h``."""

    h: float
    xi_max: float
    y_hat: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y_hat, dtype=complex)
        if y.shape != (self.size, 2):
            raise ValueError(f"expected shape {(self.size, 2)}, got {y.shape}")
        object.__setattr__(self, "y_hat", y)

    @property
    def K(self) -> int:
        return int(round(self.xi_max / self.h))

    @property
    def size(self) -> int:
        return 2 * self.K + 1

    @property
    def xi(self) -> np.ndarray:
        return self.h * np.arange(-self.K, self.K + 1, dtype=float)

    @property
    def norm_sq(self) -> float:
        return _line_norm_sq(self.y_hat, self.h)

    @classmethod
    def from_function(cls, f, h: float = LINE_H, xi_max: float = LINE_XI_MAX) -> "LineField":
        """``f(xi)`` returns an ``(n, 2)`` array of ``(u_hat, v_hat)``."""
        K = int(round(xi_max / h))
        xi = h * np.arange(-K, K + 1, dtype=float)
        return cls(h, xi_max, np.asarray(f(xi), dtype=complex))


def _line_norm_sq(y_hat: np.ndarray, h: float) -> float:
    w = np.sum(np.abs(y_hat) ** 2, axis=1)
    return float(h * (np.sum(w) - 0.5 * (w[0] + w[-1])) / (2.0 * math.pi))


# ---------------------------------------------------------------------------
# Propagators
# ---------------------------------------------------------------------------

def propagate_mode(state: ModalState, sigma: float, t: float) -> ModalState:
    if t < 0:
        raise ValueError("t must be nonnegative")
    y = kernels.propagate(np.array([float(state.xi)]), float(sigma), float(t), state.uv_hat[None, :])
    return ModalState(state.xi, y[0])


def propagator_norm_sq(xi, sigma: float, t: float):
    """``h_plus(t, xi)``, the squared spectral norm of ``exp(-C(xi, sigma) t)``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    scalar = np.ndim(xi) == 0
    out = kernels.hplus(np.atleast_1d(np.asarray(xi, dtype=float)), float(sigma), float(t))
    return float(out[0]) if scalar else out


def top_singular_direction(xi: float, sigma: float, t: float) -> np.ndarray:
    """Unit initial vector attaining ``h_plus(t, xi)``."""
    E = sm.expm_2x2(gt_matrix(xi, sigma), t)
    vals, vecs = sm.eig_hermitian(E.conj().T @ E, vectors=True)
    return vecs[:, -1]


def evolve_torus(field_: TorusField, sigma: float, t: float) -> TorusField:
    if t < 0:
        raise ValueError("t must be nonnegative")
    return TorusField(field_.N, kernels.propagate(field_.xi, float(sigma), float(t), field_.y_hat))


def evolve_line(field_: LineField, sigma: float, t: float) -> LineField:
    if t < 0:
        raise ValueError("t must be nonnegative")
    return LineField(field_.h, field_.xi_max, kernels.propagate(field_.xi, float(sigma), float(t), field_.y_hat))


# ---------------------------------------------------------------------------
# Trajectories and certificate checks
# ---------------------------------------------------------------------------

def time_grid(t_max: float = 1e3, t_min: float = 1e-3, per_decade: int = PER_DECADE) -> np.ndarray:
    """``0`` followed by a geometric grid from ``t_min`` to ``t_max``."""
    if not 0 < t_min < t_max:
        raise ValueError("need 0 < t_min < t_max")
    n = max(2, int(round(per_decade * math.log10(t_max / t_min))) + 1)
    return np.concatenate([[0.0], np.geomspace(t_min, t_max, n)])


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    norm_sq: np.ndarray
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)


def _trajectory(xi, y0, sigma, t_grid, weight_fn, label, meta) -> Trajectory:
    ts = np.asarray(t_grid, dtype=float)
    if np.any(ts < 0):
        raise ValueError("times must be nonnegative")
    norms = pmap(lambda t: weight_fn(kernels.propagate(xi, float(sigma), float(t), y0)), list(ts))
    return Trajectory(ts, np.array(norms), label, meta)


def torus_trajectory(field_: TorusField, sigma: float, t_grid, label: str = "torus") -> Trajectory:
    return _trajectory(field_.xi, field_.y_hat, sigma, t_grid,
                       lambda y: float(np.sum(np.abs(y) ** 2)), label, {"sigma": sigma, "N": field_.N})


def line_trajectory(field_: LineField, sigma: float, t_grid, label: str = "line") -> Trajectory:
    return _trajectory(field_.xi, field_.y_hat, sigma, t_grid,
                       lambda y: _line_norm_sq(y, field_.h), label,
                       {"sigma": sigma, "h": field_.h, "xi_max": field_.xi_max})


def mode_trajectory(state: ModalState, sigma: float, t_grid, label: str = "mode") -> Trajectory:
    return _trajectory(np.array([float(state.xi)]), state.uv_hat[None, :], sigma, t_grid,
                       lambda y: float(np.sum(np.abs(y) ** 2)), label, {"sigma": sigma, "xi": state.xi})


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    max_ratio: float
    t_at_max: float
    final_ratio: float
    rows: tuple  # (t, norm_sq, envelope, ratio)

    def to_rows(self):
        return list(self.rows)


def verify_certificate(cert: DecayCertificate, trajectory: Trajectory) -> VerificationReport:
    """Compare ``|y(t)|^2`` with ``mult_const exp(-rate t) |y(0)|^2``.

    Torus certificates bound the distance to equilibrium, so trajectories
    should come from fields with zero mean of ``u`` (see ``remove_mean``).
    """
    t = np.asarray(trajectory.t, dtype=float)
    n = np.asarray(trajectory.norm_sq, dtype=float)
    y0 = float(n[0]) if t[0] == 0 else math.nan
    if not y0 > 0:
        raise ValueError("trajectory must start at t = 0 with nonzero data")
    env = cert.mult_const * np.exp(-cert.rate * t) * y0
    # log form: both norm and envelope underflow at large t
    with np.errstate(divide="ignore"):
        ratio = np.where(n > 0, np.exp(np.log(n) + cert.rate * t - math.log(cert.mult_const * y0)), 0.0)
    j = int(np.argmax(ratio))
    rows = tuple(zip(t.tolist(), n.tolist(), env.tolist(), ratio.tolist()))
    return VerificationReport(bool(ratio[j] <= 1.0 + PASS_TOL), float(ratio[j]), float(t[j]),
                              float(ratio[-1]), rows)


def verify_bound(bound_fn, trajectory: Trajectory) -> VerificationReport:
    """Same report for an absolute envelope ``t -> bound(t)`` (whole-space bounds)."""
    t = np.asarray(trajectory.t, dtype=float)
    n = np.asarray(trajectory.norm_sq, dtype=float)
    env = np.array(pmap(lambda s: float(bound_fn(float(s))), list(t)))
    ratio = n / env
    j = int(np.argmax(ratio))
    rows = tuple(zip(t.tolist(), n.tolist(), env.tolist(), ratio.tolist()))
    return VerificationReport(bool(ratio[j] <= 1.0 + PASS_TOL), float(ratio[j]), float(t[j]),
                              float(ratio[-1]), rows)


# ---------------------------------------------------------------------------
# Initial data presets
# ---------------------------------------------------------------------------

def cosine(N: int = TORUS_N) -> TorusField:
    """``u = cos x``, ``v = 0``."""
    y = np.zeros((2 * N + 1, 2), dtype=complex)
    y[N - 1, 0] = y[N + 1, 0] = 0.5
    return TorusField(N, y)


def gaussian_modes(N: int = TORUS_N, width: float = 1.0) -> TorusField:
    """``u_hat(xi) = exp(-(xi/width)^2)``, ``v_hat = 0`` on the torus."""
    y = np.zeros((2 * N + 1, 2), dtype=complex)
    y[:, 0] = np.exp(-(np.arange(-N, N + 1) / width) ** 2)
    return TorusField(N, y)


def gaussian_line(h: float = LINE_H, xi_max: float = LINE_XI_MAX) -> LineField:
    """``u_hat(xi) = exp(-xi^2)``, ``v_hat = 0``: ``|u0|_L1 = 1``, ``|y0|^2 = sqrt(pi/2)/(2pi)``."""
    return LineField.from_function(lambda x: np.column_stack([np.exp(-x * x), np.zeros_like(x)]), h, xi_max)


def worst_case_vector(xi: float, sigma: float, cert: DecayCertificate | None = None, t_grid=None,
                      angles: int = ANGLE_GRID) -> np.ndarray:
    """Unit ``(cos a, i sin a)`` maximizing the envelope ratio of mode ``xi`` over ``t_grid``.

    The propagator maps the real subspace ``(a, i b)`` into itself, and its top
    singular vectors lie there, so a grid over one angle suffices.
    """
    if t_grid is None:
        t_grid = time_grid(1e2, 1e-3, 50)
    ts = np.asarray(t_grid, dtype=float)
    rate = 0.0 if cert is None else cert.rate
    phi = np.pi * np.arange(angles) / angles
    y0 = np.column_stack([np.cos(phi), 1j * np.sin(phi)])
    x = np.full(angles, float(xi))
    best = np.zeros(angles)
    for t in ts:
        y = kernels.propagate(x, float(sigma), float(t), y0)
        best = np.maximum(best, np.sum(np.abs(y) ** 2, axis=1) * math.exp(rate * t))
    return y0[int(np.argmax(best))]


def worst_case(xi: int, sigma: float, N: int = TORUS_N, cert: DecayCertificate | None = None,
               t_grid=None) -> TorusField:
    """Real torus field supported on modes ``+-xi`` along the worst direction."""
    xi = int(xi)
    if not 0 < abs(xi) <= N:
        raise ValueError("worst_case needs 0 < |xi| <= N")
    w = worst_case_vector(abs(xi), sigma, cert, t_grid)
    y = np.zeros((2 * N + 1, 2), dtype=complex)
    y[N + abs(xi)] = w
    y[N - abs(xi)] = np.conj(w)
    return TorusField(N, y)


def remove_mean(field_: TorusField) -> TorusField:
    """Subtract the conserved mean of ``u`` (the equilibrium)."""
    y = field_.y_hat.copy()
    y[field_.N, 0] = 0.0
    return TorusField(field_.N, y)


def random_field(rng: np.random.Generator, N: int = TORUS_N, decay: float = 1.0) -> TorusField:
    """Real random field with zero ``u`` mean, coefficients damped like ``(1 + |xi|)^-decay``."""
    y = np.zeros((2 * N + 1, 2), dtype=complex)
    for k in range(0, N + 1):
        amp = (1.0 + k) ** -decay
        z = amp * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
        if k == 0:
            z = np.array([0.0, z[1].real], dtype=complex)
        y[N + k] = z
        y[N - k] = np.conj(z)
    return TorusField(N, y)


def preset(name: str, sigma: float = 1.0, N: int = TORUS_N, xi: int = 1) -> TorusField:
    if name == "cosine":
        return cosine(N)
    if name == "gaussian_modes":
        return gaussian_modes(N)
    if name == "worst_case":
        return worst_case(xi, sigma, N)
    raise ValueError(f"unknown preset {name!r}; expected one of {PRESETS}")
