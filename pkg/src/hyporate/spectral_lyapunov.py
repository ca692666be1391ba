"""Lyapunov matrix inequalities for modal ODE systems and their global assembly.

For a mode ``d/dt y = -C(xi) y`` a Hermitian positive definite ``P`` with
``C* P + P C >= 2 mu P`` gives ``|y(t)|^2 <= cond(P) exp(-2 mu t) |y(0)|^2``.
This module builds such matrices (generic eigenvector dyads and the closed-form
Goldstein-Taylor families), verifies the inequality numerically and combines
the modal certificates into global ones on the torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import smallmat as sm
from .errors import (
    CertificateViolation,
    DefectiveMatrix,
    DefectiveSigma,
    FamilyDomainError,
    ThetaOutOfRange,
    ZeroEigenvalue,
)

CERT_TOL = 1e-9
DEFAULT_XI_MAX = 256
FAMILIES = ("eigendyad", "P1", "P2", "Pbar_theta", "Ptilde", "eps_defective")


@dataclass(frozen=True)
class GTSystem:
    sigma: float
    domain: str = "torus"

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError("sigma must be positive and finite")
        if self.domain not in ("torus", "line"):
            raise ValueError("domain must be 'torus' or 'line'")

    def matrix(self, xi: float) -> np.ndarray:
        return gt_matrix(xi, self.sigma)


@dataclass(frozen=True)
class ModalMatrixSystem:
    """A family ``xi -> C(xi)`` of mode matrices."""

    builder: object
    dim: int

    def matrix(self, xi: float) -> np.ndarray:
        c = sm.as_matrix(self.builder(xi))
        if c.shape != (self.dim, self.dim):
            raise ValueError(f"builder returned shape {c.shape}, expected {(self.dim, self.dim)}")
        return c


@dataclass(frozen=True)
class DeformationMatrix:
    P: np.ndarray
    certified_rate: float
    family_tag: str
    xi: float | None = None
    sigma: float | None = None
    param: float | None = None

    @property
    def cond(self) -> float:
        return sm.condition_number(self.P)


@dataclass(frozen=True)
class DecayCertificate:
    """``|y(t)|^2 <= mult_const * exp(-rate t) * |y(0)|^2``.

    ``mult_const`` multiplies squared norms; ``norm_const`` is its square root,
    the constant in front of ``|y(0)|`` when the estimate is written for norms.
    """

    mult_const: float
    rate: float
    scope: str
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.mult_const >= 1.0 - 1e-12:
            raise ValueError(f"mult_const must be >= 1, got {self.mult_const!r}")
        if not self.rate >= 0:
            raise ValueError(f"rate must be >= 0, got {self.rate!r}")

    @property
    def norm_const(self) -> float:
        return math.sqrt(self.mult_const)

    def envelope(self, t):
        return self.mult_const * np.exp(-self.rate * np.asarray(t, dtype=float))

    def to_json(self) -> dict:
        out = {
            "scope": self.scope,
            "mult_const": self.mult_const,
            "norm_const": self.norm_const,
            "rate": self.rate,
        }
        for key in sorted(self.provenance):
            out[key] = self.provenance[key]
        return out


class XiSet:
    """The set of slowest modes: all nonzero integers, or a finite set."""

    def __init__(self, members=None):
        self.members = None if members is None else tuple(sorted(members))

    @property
    def all_nonzero(self) -> bool:
        return self.members is None

    def __contains__(self, xi) -> bool:
        if self.members is None:
            return xi != 0
        return xi in self.members

    def __eq__(self, other):
        return isinstance(other, XiSet) and self.members == other.members

    def __repr__(self):
        return "Z\\{0}" if self.members is None else "{" + ", ".join(str(m) for m in self.members) + "}"


# ---------------------------------------------------------------------------
# Goldstein-Taylor mode matrices and spectral gaps
# ---------------------------------------------------------------------------

def gt_matrix(xi: float, sigma: float) -> np.ndarray:
    return np.array([[0.0, 1j * xi], [1j * xi, sigma]], dtype=complex)


def modal_spectral_gap(xi: float, sigma: float) -> float:
    if xi == 0:
        raise ValueError("the spectral gap is defined for xi != 0")
    r = 0.25 * sigma * sigma - xi * xi
    if r <= 0:
        return 0.5 * sigma
    # sigma/2 - sqrt(r), written without cancellation
    return xi * xi / (0.5 * sigma + math.sqrt(r))


def uniform_gap(sigma: float):
    """``(mu_bar, Xi)``: uniform spectral gap over nonzero integer modes."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if sigma <= 2.0:
        return 0.5 * sigma, XiSet()
    return modal_spectral_gap(1.0, sigma), XiSet((-1, 1))


def theta_of_sigma(sigma: float) -> float:
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if sigma == 2.0:
        raise DefectiveSigma("theta(sigma) is undefined at sigma = 2")
    return sigma if sigma < 2.0 else 4.0 / sigma


def theta_eps(eps: float) -> float:
    return 2.0 * (2.0 - eps * eps) / (2.0 + eps * eps)


def mu_tilde(xi: float) -> float:
    x2 = xi * xi
    q = 4.0 * x2 * (1.0 + 4.0 * x2)
    r = math.sqrt(1.0 + q)
    # 1 - 1/r without cancellation for small xi
    return 0.5 * q / (r * (r + 1.0))


def _twist(offdiag_imag: float) -> np.ndarray:
    # [[1, -i a], [i a, 1]]
    return np.array([[1.0, -1j * offdiag_imag], [1j * offdiag_imag, 1.0]], dtype=complex)


def _twist_cond(a: float) -> float:
    a = abs(a)
    return (1.0 + a) / (1.0 - a)


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------

def inequality_residual(P, C, rate: float) -> float:
    """Smallest eigenvalue of ``C* P + P C - rate P`` after scaling ``P`` to norm 1."""
    P = sm.as_matrix(P)
    C = sm.as_matrix(C)
    scale = sm.eig_hermitian(sm.hermitian_part(P))[-1]
    Ps = P / scale
    S = C.conj().T @ Ps + Ps @ C - rate * Ps
    return float(sm.eig_hermitian(sm.hermitian_part(S))[0])


def optimal_rate(P, C) -> float:
    """Largest ``r`` with ``C* P + P C >= r P``: ``lambda_min(L^-1 S L^-*)``."""
    P = sm.hermitian_part(P)
    C = sm.as_matrix(C)
    low = sm.cholesky(P)
    S = C.conj().T @ P + P @ C
    n = P.shape[0]
    # W = L^{-1} S L^{-*}
    tmp = np.column_stack([sm.lower_solve(low, S[:, j]) for j in range(n)])
    W = np.column_stack([sm.lower_solve(low, tmp.conj().T[:, j]) for j in range(n)]).conj().T
    return float(sm.eig_hermitian(sm.hermitian_part(W))[0])


def certify(D: DeformationMatrix, C, scope: str = "modal") -> DecayCertificate:
    """Check ``C* P + P C >= rate P`` and return ``(cond(P), rate)``."""
    res = inequality_residual(D.P, C, D.certified_rate)
    if res < -CERT_TOL:
        raise CertificateViolation(
            f"{D.family_tag} matrix fails the Lyapunov inequality at rate {D.certified_rate!r} "
            f"(smallest eigenvalue {res:.3e})",
            res,
        )
    cond = sm.condition_number(D.P)
    prov = {"family": D.family_tag, "xi": D.xi, "sigma": D.sigma, "cond": cond, "residual": res}
    return DecayCertificate(cond, D.certified_rate, scope, prov)


# ---------------------------------------------------------------------------
# Deformation matrices
# ---------------------------------------------------------------------------

def build_P_eigendyad(C, weights=None, kernel_policy: str | None = None) -> DeformationMatrix:
    """``P = sum_j c_j w_j w_j^*`` over normalized eigenvectors ``w_j`` of ``C*``.

    The certified rate is ``2 mu`` with ``mu`` the smallest real part of the
    spectrum.  With ``kernel_policy="allow"`` a zero eigenvalue is accepted
    (the rate is then 0); by default it raises ``ZeroEigenvalue``.
    """
    C = sm.as_matrix(C)
    n = C.shape[0]
    if weights is None:
        weights = [1.0] * n
    weights = [float(w) for w in weights]
    if len(weights) != n or any(not w > 0 for w in weights):
        raise ValueError("need one positive weight per eigenvalue")
    res = sm.eig_general(C)
    scale = max(1.0, sm.inf_norm(C))
    if any(abs(v) <= sm.CLUSTER_RADIUS * scale for v in res.values) and kernel_policy != "allow":
        raise ZeroEigenvalue("C has a zero eigenvalue; exclude that mode or pass kernel_policy='allow'")
    if any(res.defect_flags):
        mu = min(v.real for v in res.values)
        slow = [f for v, f in zip(res.values, res.defect_flags) if abs(v.real - mu) <= sm.CLUSTER_RADIUS * scale]
        which = "with minimal real part " if any(slow) else ""
        raise DefectiveMatrix(f"C has a defective eigenvalue {which}; no eigenvector basis")
    mu = min(v.real for v in res.values)
    Cstar = C.conj().T
    P = np.zeros((n, n), dtype=complex)
    j = 0
    values = list(res.values)
    while j < n:
        # group numerically equal eigenvalues and take an eigenbasis of the cluster
        k = j
        while k + 1 < n and abs(values[k + 1] - values[j]) <= sm.CLUSTER_RADIUS * scale:
            k += 1
        m = k - j + 1
        basis = sm.eigenspace(Cstar, values[j].conjugate(), m)
        for i in range(m):
            w = basis[:, i]
            P += weights[j + i] * np.outer(w, w.conj())
        j = k + 1
    P = sm.hermitian_part(P)
    D = DeformationMatrix(P, 2.0 * mu, "eigendyad")
    certify(D, C)
    return D


def gt_P_family(xi: float, sigma: float, family_tag: str, theta: float | None = None,
                eps: float | None = None, weights=None) -> DeformationMatrix:
    """Closed-form deformation matrices for the Goldstein-Taylor mode ``C(xi, sigma)``."""
    if family_tag not in FAMILIES:
        raise FamilyDomainError(f"unknown family {family_tag!r}; expected one of {FAMILIES}")
    if xi == 0:
        raise FamilyDomainError("the xi = 0 mode is handled by conservation, not by a deformation matrix")
    if not sigma > 0:
        raise FamilyDomainError("sigma must be positive")
    ax = abs(xi)
    if family_tag == "eigendyad":
        D = build_P_eigendyad(gt_matrix(xi, sigma), weights)
        return DeformationMatrix(D.P, D.certified_rate, "eigendyad", xi, sigma)
    if family_tag == "P1":
        if not ax > 0.5 * sigma:
            raise FamilyDomainError("P1 needs |xi| > sigma/2")
        return DeformationMatrix(_twist(sigma / (2.0 * xi)), 2.0 * modal_spectral_gap(xi, sigma), "P1", xi, sigma)
    if family_tag == "P2":
        if not 0 < ax < 0.5 * sigma:
            raise FamilyDomainError("P2 needs 0 < |xi| < sigma/2")
        return DeformationMatrix(_twist(2.0 * xi / sigma), 2.0 * modal_spectral_gap(xi, sigma), "P2", xi, sigma)
    if family_tag == "Pbar_theta":
        if theta is None:
            try:
                theta = theta_of_sigma(sigma)
            except DefectiveSigma as exc:
                raise FamilyDomainError(str(exc)) from None
            default = True
        else:
            default = sigma != 2.0 and theta == theta_of_sigma(sigma)
        if not 0 < theta < 2:
            raise FamilyDomainError("theta must lie in (0, 2)")
        if not ax > 0.5 * theta:
            raise FamilyDomainError("Pbar(xi, theta) is positive definite only for |xi| > theta/2")
        P = _twist(theta / (2.0 * xi))
        if default:
            rate = 2.0 * uniform_gap(sigma)[0]
        else:
            rate = optimal_rate(P, gt_matrix(xi, sigma))
        return DeformationMatrix(P, rate, "Pbar_theta", xi, sigma, theta)
    if family_tag == "Ptilde":
        if sigma != 1.0:
            raise FamilyDomainError("the Ptilde family is defined for sigma = 1")
        return DeformationMatrix(_twist(2.0 * xi / (1.0 + 4.0 * xi * xi)), 2.0 * mu_tilde(xi), "Ptilde", xi, sigma)
    # eps_defective
    if sigma != 2.0:
        raise FamilyDomainError("the eps_defective family is defined for sigma = 2")
    if eps is None or not 0 < eps < 1:
        raise FamilyDomainError("eps_defective needs eps in (0, 1)")
    th = theta_eps(eps)
    if not ax > 0.5 * th:
        raise FamilyDomainError("Pbar(xi, theta_eps) needs |xi| > theta_eps/2")
    return DeformationMatrix(_twist(th / (2.0 * xi)), 2.0 * (1.0 - eps), "eps_defective", xi, sigma, eps)


def family_cond(xi: float, sigma: float, family_tag: str, theta: float | None = None,
                eps: float | None = None) -> float:
    """Closed-form condition numbers of the twist families."""
    ax = abs(xi)
    if family_tag == "P1":
        return (2.0 * ax + sigma) / (2.0 * ax - sigma)
    if family_tag == "P2":
        return (sigma + 2.0 * ax) / (sigma - 2.0 * ax)
    if family_tag == "Pbar_theta":
        th = theta_of_sigma(sigma) if theta is None else theta
        return (ax + 0.5 * th) / (ax - 0.5 * th)
    if family_tag == "Ptilde":
        x2 = xi * xi
        return (1.0 + 2.0 * ax + 4.0 * x2) / (1.0 - 2.0 * ax + 4.0 * x2)
    if family_tag == "eps_defective":
        th = theta_eps(eps)
        return (ax + 0.5 * th) / (ax - 0.5 * th)
    raise FamilyDomainError(f"no closed-form condition number for {family_tag!r}")


# ---------------------------------------------------------------------------
# Global assembly on the torus
# ---------------------------------------------------------------------------

def _sharp_family(xi: int, sigma: float):
    ax = abs(xi)
    if 2 * ax > sigma:
        return "P1"
    if 2 * ax < sigma:
        return "P2"
    return None  # defective mode


def _modes(sigma: float, xi_max: int):
    # every cond formula is monotone once |xi| exceeds sigma/2 + 1
    top = max(int(xi_max), int(math.ceil(0.5 * sigma)) + 2)
    return [x for k in range(1, top + 1) for x in (-k, k)]


def _sigma_system(system) -> float:
    if isinstance(system, GTSystem):
        if system.domain != "torus":
            raise ValueError("global assembly is implemented on the torus")
        return system.sigma
    return float(system)


def _eps_certificate(sigma: float, eps: float, xi_max: int, strategy: int) -> DecayCertificate:
    worst, rows = 1.0, []
    for xi in _modes(sigma, xi_max):
        D = gt_P_family(xi, sigma, "eps_defective", eps=eps)
        c = certify(D, gt_matrix(xi, sigma))
        rows.append((xi, "eps_defective", c.mult_const, c.provenance["residual"]))
        worst = max(worst, c.mult_const)
    prov = {"strategy": strategy, "sigma": sigma, "eps": eps, "theta": theta_eps(eps),
            "mu_bar": 1.0, "Xi": "Z\\{0}", "modes": rows}
    return DecayCertificate(worst, 2.0 * (1.0 - eps), "global_torus", prov)


def assemble_strategy1(system, sigma: float | None = None, xi_max: int = DEFAULT_XI_MAX,
                       eps: float | None = None) -> DecayCertificate:
    """Sharp modal matrices everywhere; constant is ``sup_xi cond(P(xi))``.

    For even integer ``sigma >= 4`` the mode ``|xi| = sigma/2`` is defective and
    no sharp matrix exists, so the constant is infinite.
    """
    sigma = _sigma_system(system) if sigma is None else float(sigma)
    mu_bar, Xi = uniform_gap(sigma)
    if sigma == 2.0:
        if eps is None:
            raise DefectiveSigma("sigma = 2: the slowest modes are defective; supply eps")
        return _eps_certificate(sigma, eps, xi_max, 1)
    worst, rows = 1.0, []
    for xi in _modes(sigma, xi_max):
        fam = _sharp_family(xi, sigma)
        if fam is None:
            rows.append((xi, "defective", math.inf, None))
            worst = math.inf
            continue
        c = certify(gt_P_family(xi, sigma, fam), gt_matrix(xi, sigma))
        rows.append((xi, fam, c.mult_const, c.provenance["residual"]))
        worst = max(worst, c.mult_const)
    prov = {"strategy": 1, "sigma": sigma, "mu_bar": mu_bar, "Xi": repr(Xi), "modes": rows}
    if sigma != 2.0:
        prov["theta"] = theta_of_sigma(sigma)
    return DecayCertificate(worst, 2.0 * mu_bar, "global_torus", prov)


def assemble_strategy2(system, sigma: float | None = None, xi_max: int = DEFAULT_XI_MAX,
                       eps: float | None = None) -> DecayCertificate:
    """Keep sharp matrices on the slowest modes, swap faster ones for ``Pbar``.

    ``c_Xi`` is the largest condition number over the slowest modes; any other
    mode whose sharp matrix is worse (or does not exist) gets
    ``Pbar(xi, theta(sigma))``, certified at the uniform rate ``2 mu_bar``.
    """
    sigma = _sigma_system(system) if sigma is None else float(sigma)
    mu_bar, Xi = uniform_gap(sigma)
    if sigma == 2.0:
        if eps is None:
            raise DefectiveSigma("sigma = 2: the slowest modes are defective; supply eps")
        return _eps_certificate(sigma, eps, xi_max, 2)
    modes = _modes(sigma, xi_max)
    slow = [xi for xi in modes if xi in Xi]
    c_xi = 1.0
    for xi in slow:
        c_xi = max(c_xi, certify(gt_P_family(xi, sigma, _sharp_family(xi, sigma)), gt_matrix(xi, sigma)).mult_const)
    worst, rows = 1.0, []
    for xi in modes:
        C = gt_matrix(xi, sigma)
        fam = _sharp_family(xi, sigma)
        cert = None
        if fam is not None:
            cert = certify(gt_P_family(xi, sigma, fam), C)
            if xi not in Xi and cert.mult_const > c_xi:
                cert = None
        if cert is None:
            fam = "Pbar_theta"
            cert = certify(gt_P_family(xi, sigma, fam), C)
        if cert.rate < 2.0 * mu_bar - 1e-12:
            raise CertificateViolation(f"mode {xi} certified below the uniform rate", cert.rate - 2.0 * mu_bar)
        rows.append((xi, fam, cert.mult_const, cert.provenance["residual"]))
        worst = max(worst, cert.mult_const)
    prov = {"strategy": 2, "sigma": sigma, "mu_bar": mu_bar, "Xi": repr(Xi), "c_Xi": c_xi,
            "theta": theta_of_sigma(sigma), "modes": rows}
    return DecayCertificate(worst, 2.0 * mu_bar, "global_torus", prov)


# ---------------------------------------------------------------------------
# Torus functionals
# ---------------------------------------------------------------------------

def _mode_axis(n: int, xi=None) -> np.ndarray:
    if xi is not None:
        xi = np.asarray(xi, dtype=float)
        if xi.shape[0] != n:
            raise ValueError("xi and modal arrays differ in length")
        return xi
    if n % 2 == 0:
        raise ValueError("modal arrays must have odd length 2N+1 (modes -N..N)")
    N = n // 2
    return np.arange(-N, N + 1, dtype=float)


def entropy_theta(u_hat, v_hat, theta: float, xi=None) -> float:
    """``sum_{xi != 0} |y(xi)|^2_{Pbar(xi, theta)} + |v_hat(0)|^2``.

    Arrays hold normalized torus coefficients ``(1/2pi) int exp(-i x xi) f`` for
    ``xi = -N..N`` (or for the modes in ``xi``).  The mean of ``u`` is ignored.
    """
    if not 0 <= theta < 2:
        raise ThetaOutOfRange("theta must lie in [0, 2)")
    u = np.asarray(u_hat, dtype=complex)
    v = np.asarray(v_hat, dtype=complex)
    if u.shape != v.shape:
        raise ValueError("u_hat and v_hat must have the same shape")
    k = _mode_axis(u.shape[0], xi)
    nz = k != 0
    a = np.zeros_like(k)
    a[nz] = theta / (2.0 * k[nz])
    # y* [[1, -i a], [i a, 1]] y = |u|^2 + |v|^2 + 2 Re(conj(u) (-i a) v)
    quad = np.abs(u) ** 2 + np.abs(v) ** 2 + 2.0 * np.real(np.conj(u) * (-1j * a) * v)
    return float(np.sum(quad[nz]) + np.sum(np.abs(v[~nz]) ** 2))


def entropy_theta_spatial(u, v, theta: float) -> float:
    """The same functional from equispaced samples of real ``u, v`` on ``[0, 2pi)``.

    The anti-derivative with zero mean is taken spectrally; the integral is the
    periodic trapezoid rule.
    """
    if not 0 <= theta < 2:
        raise ThetaOutOfRange("theta must lie in [0, 2)")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    n = u.shape[0]
    u0 = u - u.mean()
    k = np.fft.fftfreq(n, d=1.0 / n)
    uh = np.fft.fft(u0)
    ih = np.zeros_like(uh)
    nz = k != 0
    ih[nz] = uh[nz] / (1j * k[nz])
    anti = np.real(np.fft.ifft(ih))
    return float(np.mean(u0 * u0 + v * v - theta * v * anti))


def A_matrix(xi: float) -> np.ndarray:
    """``(Id + (T Pi)^* T Pi)^{-1} (T Pi)^*`` for the Goldstein-Taylor mode."""
    T = np.array([[0.0, 1j * xi], [1j * xi, 0.0]], dtype=complex)
    Pi = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    TP = T @ Pi
    lhs = np.eye(2) + TP.conj().T @ TP
    rhs = TP.conj().T
    return np.column_stack([sm.solve(lhs, rhs[:, j]) for j in range(2)])


def H1_modal(y_hat, xi: float, delta: float) -> float:
    """``|y|^2/2 + delta Re(y^* A(xi) y)``."""
    y = np.asarray(y_hat, dtype=complex)
    A = A_matrix(xi)
    return float(0.5 * np.sum(np.abs(y) ** 2) + delta * np.real(y.conj() @ A @ y))


def delta_bar(xi: float, sigma: float) -> float:
    return theta_of_sigma(sigma) * (1.0 + xi * xi) / (2.0 * xi * xi)


def H1_tilde(u_hat, v_hat, sigma: float, xi=None) -> float:
    """``2 sum_{xi != 0} H1(xi, delta_bar(xi, sigma))[y(xi)]``."""
    u = np.asarray(u_hat, dtype=complex)
    v = np.asarray(v_hat, dtype=complex)
    k = _mode_axis(u.shape[0], xi)
    total = 0.0
    for j, x in enumerate(k):
        if x == 0:
            continue
        total += 2.0 * H1_modal((u[j], v[j]), x, delta_bar(x, sigma))
    return total


def H2_tilde(u_hat, v_hat, sigma: float, xi=None) -> float:
    """``sum_{xi != 0} |y(xi)|^2_{Pbar(xi, theta(sigma))}``."""
    u = np.asarray(u_hat, dtype=complex)
    v = np.asarray(v_hat, dtype=complex)
    k = _mode_axis(u.shape[0], xi)
    th = theta_of_sigma(sigma)
    total = 0.0
    for j, x in enumerate(k):
        if x == 0:
            continue
        y = np.array([u[j], v[j]])
        total += float(np.real(y.conj() @ _twist(th / (2.0 * x)) @ y))
    return total
