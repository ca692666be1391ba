import math

import numpy as np
import pytest

from hyporate import gt_sim as gs
from hyporate import smallmat as sm
from hyporate import spectral_lyapunov as sl
from hyporate.decay_bounds import gt_line_global_bound


def rk4(C, y0, t, h=1e-4):
    y = np.array(y0, dtype=complex)
    f = lambda z: -C @ z  # noqa: E731
    for _ in range(int(round(t / h))):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def test_mass_conservation(rng):
    f = gs.random_field(rng, 16)
    y = f.y_hat.copy()
    y[16, 0] = 0.7
    f = gs.TorusField(16, y)
    for t in np.linspace(0, 50, 26):
        assert abs(gs.evolve_torus(f, 1.3, t).y_hat[16, 0] - 0.7) <= 1e-13


def test_zero_mode_flux():
    st = gs.ModalState(0.0, [0.4, 1.0])
    for t in (0.5, 2.0, 7.0):
        out = gs.propagate_mode(st, 1.7, t).uv_hat
        assert out[0] == pytest.approx(0.4, abs=1e-15)
        assert out[1] == pytest.approx(math.exp(-1.7 * t), rel=1e-13)


def test_semigroup(rng):
    for _ in range(20):
        xi, sigma = rng.uniform(0, 3), rng.uniform(0.2, 4)
        t, s = rng.uniform(0, 5, size=2)
        st = gs.ModalState(xi, rng.standard_normal(2) + 1j * rng.standard_normal(2))
        a = gs.propagate_mode(gs.propagate_mode(st, sigma, t), sigma, s).uv_hat
        b = gs.propagate_mode(st, sigma, t + s).uv_hat
        assert np.allclose(a, b, atol=1e-13)


@pytest.mark.parametrize("xi,sigma", [(1.0, 2.0), (1.0, 1.0), (0.2, 3.0)])
def test_rk4_oracle(xi, sigma):
    y0 = np.array([1.0, 0.5j])
    ref = rk4(sl.gt_matrix(xi, sigma), y0, 1.0)
    got = gs.propagate_mode(gs.ModalState(xi, y0), sigma, 1.0).uv_hat
    assert np.max(np.abs(ref - got)) <= 1e-8


def test_hplus_basics():
    assert gs.propagator_norm_sq(0.7, 1.0, 0.0) == pytest.approx(1.0, abs=1e-14)
    for t in (1.0, 5.0, 10.0):
        h0 = gs.propagator_norm_sq(0.5, 1.0, t)
        for d in (-1e-6, 1e-6):
            assert abs(gs.propagator_norm_sq(0.5 + d, 1.0, t) - h0) <= 1e-4


def test_hplus_dominates_and_is_attained(rng):
    for xi in (0.1, 0.5, 1.0, 3.0):
        for t in (0.3, 1.0, 4.0):
            h = gs.propagator_norm_sq(xi, 1.0, t)
            for _ in range(50):
                y = rng.standard_normal(2) + 1j * rng.standard_normal(2)
                r = gs.propagate_mode(gs.ModalState(xi, y), 1.0, t).norm_sq / np.sum(np.abs(y) ** 2)
                assert r <= h * (1 + 1e-12)
            w = gs.top_singular_direction(xi, 1.0, t)
            r = gs.propagate_mode(gs.ModalState(xi, w), 1.0, t).norm_sq
            assert r == pytest.approx(h, abs=1e-10)


def test_hplus_below_ptilde_envelope():
    for xi in np.linspace(0.01, 3, 80):
        if abs(xi - 0.5) < 1e-3:
            continue
        D = sl.gt_P_family(xi, 1.0, "Ptilde")
        for t in (0.5, 2.0, 10.0, 40.0):
            env = D.cond * math.exp(-D.certified_rate * t)
            assert gs.propagator_norm_sq(xi, 1.0, t) <= env * (1 + 1e-10)


def test_parseval(rng):
    for N in (4, 32, 64):
        f = gs.random_field(rng, N)
        assert f.is_real()
        assert f.spatial_norm_sq(2048) == pytest.approx(f.norm_sq, abs=1e-9)
        u, v = f.to_spatial(2048)
        back = gs.TorusField.from_spatial(u, v, N)
        assert np.allclose(back.y_hat, f.y_hat, atol=1e-12)


def test_cosine_envelope():
    traj = gs.torus_trajectory(gs.cosine(8), 1.0, gs.time_grid(50, 1e-3, 50))
    rep = gs.verify_certificate(sl.DecayCertificate(3.0, 1.0, "modal"), traj)
    assert rep.passed


@pytest.mark.parametrize("sigma", [0.5, 1.0, 3.0])
def test_entropy_decay(sigma, rng):
    f = gs.random_field(rng, 16)
    theta = sl.theta_of_sigma(sigma)
    mu = sl.uniform_gap(sigma)[0]
    ts = np.linspace(0, 20, 81)
    E = [sl.entropy_theta(g.y_hat[:, 0], g.y_hat[:, 1], theta)
         for g in (gs.evolve_torus(f, sigma, t) for t in ts)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(E, E[1:]))
    for t, e in zip(ts, E):
        assert e <= E[0] * math.exp(-2 * mu * t) * (1 + 1e-10) + 1e-300


def test_identity_certificate_passes(rng):
    traj = gs.torus_trajectory(gs.random_field(rng, 8), 0.8, gs.time_grid(10, 1e-2, 20))
    rep = gs.verify_certificate(sl.DecayCertificate(1.0, 0.0, "identity"), traj)
    assert rep.passed and rep.max_ratio == pytest.approx(1.0)


def test_random_fields_sigma1(rng):
    cert = sl.assemble_strategy2(1.0, xi_max=16)
    ts = gs.time_grid(100, 1e-3, 40)
    worst = 0.0
    for _ in range(100):
        rep = gs.verify_certificate(cert, gs.torus_trajectory(gs.random_field(rng, 16), 1.0, ts))
        assert rep.passed
        worst = max(worst, rep.max_ratio)
    assert worst < 1


def test_worst_case_sharpness():
    cert = sl.assemble_strategy2(1.0, xi_max=16)
    f = gs.worst_case(1, 1.0, 16, cert)
    rep = gs.verify_certificate(cert, gs.torus_trajectory(f, 1.0, gs.time_grid(100, 1e-3, 100)))
    assert rep.passed and rep.max_ratio >= 0.9


def test_eps_certificate_and_defective_data():
    sigma = 2.0
    cert = sl.assemble_strategy2(sigma, eps=0.1, xi_max=16)
    naive = sl.DecayCertificate(2.0, 2.0, "naive")
    f = gs.worst_case(1, sigma, 16, naive)
    ts = gs.time_grid(100, 1e-3, 100)
    traj = gs.torus_trajectory(f, sigma, ts)
    assert gs.verify_certificate(cert, traj).passed
    assert not gs.verify_certificate(sl.DecayCertificate(200.0, 2.0, "naive"), traj).passed


def test_line_gaussian():
    f = gs.gaussian_line()
    assert f.norm_sq == pytest.approx(math.sqrt(math.pi / 2) / (2 * math.pi), rel=1e-10)
    ts = gs.time_grid(1e3, 1e-2, 20)
    traj = gs.line_trajectory(f, 1.0, ts)
    scaled = traj.norm_sq[ts >= 10] * np.sqrt(ts[ts >= 10])
    assert scaled.max() / scaled.min() < 10
    rep = gs.verify_bound(lambda t: gt_line_global_bound(t, 1.0, f.norm_sq), traj)
    assert rep.passed


def test_presets_and_validation():
    assert gs.preset("cosine", N=4).norm_sq == pytest.approx(0.5)
    assert gs.preset("worst_case", 1.0, 4).is_real()
    with pytest.raises(ValueError):
        gs.preset("nope")
    with pytest.raises(ValueError):
        gs.TorusField(2, np.zeros((4, 2)))
    with pytest.raises(ValueError):
        gs.propagate_mode(gs.ModalState(1.0, [1, 0]), 1.0, -1.0)
    assert gs.remove_mean(gs.gaussian_modes(4)).mean_u == 0
