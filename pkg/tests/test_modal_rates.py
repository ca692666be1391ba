import math
import warnings

import numpy as np
import pytest

from hyporate import abstract_rates as ar
from hyporate import modal_rates as mr
from hyporate.errors import InfeasibleMode

LSTAR = 1 - math.sqrt(3 / 7)


def test_constants_of_mode():
    k = mr.constants_of_mode(1.0)
    assert (k.lambda_m, k.lambda_M) == (1.0, 1.0)
    assert k.C_M == pytest.approx((1 + math.sqrt(3)) / 2)
    assert mr.constants_of_mode(1e6).C_M == pytest.approx(math.sqrt(3), abs=1e-5)
    assert mr.constants_of_mode(1e-8).C_M / 1e-8 == pytest.approx(1.0, rel=1e-6)
    with pytest.raises(ValueError):
        mr.constants_of_mode(0.0)


def test_lambda0_values():
    assert mr.lambda0_delta0(1.0).lam == pytest.approx(1 / (3 * (1 + math.sqrt(3)) ** 2))
    assert mr.lambda0_delta0(1e8).lam == pytest.approx(1 / 9, rel=1e-6)


def test_lambda0_matches_bdms(rng):
    for s in np.exp(rng.uniform(-5, 5, 100)):
        p = mr.lambda0_delta0(s)
        t = ar.rate_bdms(mr.constants_of_mode(s))
        assert p.lam == pytest.approx(t.lam, rel=1e-12)
        assert p.delta == pytest.approx(t.delta, rel=1e-12)


def test_lambda1_matches_abstract_optimizer():
    for s in (0.1, 1.0, 5.0, 30.0):
        assert mr.max_rate("lambda1", s).lam == pytest.approx(ar.optimize_rate(mr.constants_of_mode(s)).lam, rel=1e-8)


def test_h3_reduces_to_h2(rng):
    for _ in range(50):
        d, lam, s = rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0.01, 10)
        assert mr.h3(d, lam, 1.0, s) == pytest.approx(mr.h2(d, lam, s), rel=1e-13, abs=1e-15)
        eps = rng.uniform(0.1, 10)
        ds = mr.delta_star_substitution(d, eps, s)
        assert mr.h3(d, lam, eps, s) == pytest.approx(mr.h2(ds, lam, s), rel=1e-10, abs=1e-13)


def test_h2_sign_at_zero_rate():
    # h2(delta, 0, s) = delta * (delta (a^2 + 4k^2) - 4k): negative exactly below 4k/(a^2+4k^2)
    s = 2.0
    k = s * s / (1 + s * s)
    a = s * (1 + math.sqrt(3) * s) / (1 + s * s)
    edge = 4 * k / (a * a + 4 * k * k)
    assert mr.h2(0.99 * edge, 0.0, s) < 0 < mr.h2(1.01 * edge, 0.0, s)


def test_tilde_residual_and_limits():
    for s in np.geomspace(1e-3, 1e3, 400):
        assert abs(mr.h2_tilde(mr.delta2_tilde(s), mr.lambda2_tilde(s), s)) <= 1e-9
    assert mr.lambda2_tilde(1e6) == pytest.approx(LSTAR, abs=1e-5)
    assert mr.delta2_tilde(1e6) == pytest.approx(2 / 7, abs=1e-4)
    assert mr.lambda2_tilde(1e-4) / 1e-8 == pytest.approx(2.0, rel=1e-3)


def test_tilde_stable_form_matches_printed():
    for s in (0.05, 0.5, 1.0, 5.0, 50.0):
        assert mr.lambda2_tilde(s) == pytest.approx(mr.lambda2_tilde_printed(s), rel=1e-9)


def test_tilde_monotone():
    vals = [mr.lambda2_tilde(s) for s in np.geomspace(1e-3, 1e4, 600)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_tilde_is_optimal_for_h2_tilde():
    # generic machinery on h2_tilde reproduces the closed form
    from hyporate import kernels

    for s in (0.1, 1.0, 10.0):
        lam, d = kernels.max_rate(kernels.H2_TILDE, s, 1.0, 60)
        assert lam == pytest.approx(mr.lambda2_tilde(s), rel=1e-9)


def test_value_at_one():
    assert mr.lambda2_tilde(1.0) == pytest.approx(0.165, abs=0.005)
    assert mr.delta2_tilde(1.0) == pytest.approx(0.325, abs=0.005)


@pytest.fixture(scope="module")
def curves():
    grid = np.geomspace(1e-2, 1e2, 80)
    return grid, {v: mr.lambda_curve(v, grid) for v in ("lambda0", "lambda1", "lambda2", "lambda2_tilde")}


def test_dominance_chain(curves):
    grid, c = curves
    l0, l1, l2, lt = (np.array(c[v].lambdas) for v in ("lambda0", "lambda1", "lambda2", "lambda2_tilde"))
    assert np.all(l0 <= l1 + 1e-14)
    assert np.all(l1 <= l2 + 1e-14)
    assert np.all(lt <= l2 + 1e-12)
    assert np.all((l2 - lt) / l2 <= 0.15)
    scaled = (l2 - lt) * (1 + grid ** -2.0)
    # bounded, and small at both ends of the grid (same asymptotics)
    assert np.max(scaled) < 0.5
    assert scaled[0] < 0.5 * np.max(scaled) and scaled[-1] < 1e-3


def test_feasibility_in_triangles(curves):
    grid, c = curves
    for s, p in zip(grid, c["lambda1"].points):
        assert mr.in_triangle("lambda1", p.delta, p.lam, s)
        assert mr.h1(p.delta, p.lam, s) <= 1e-12
    for s, p in zip(grid, c["lambda2"].points):
        assert mr.in_triangle("lambda2", p.delta, p.lam, s)
        assert mr.h2(p.delta, p.lam, s) <= 1e-12
        assert p.C_of_s == pytest.approx(mr.norm_constant(s, p.delta))


def test_lambda2_brute_force():
    # independent oracle: dense (delta, lambda) grid over the triangle
    s = 1.0
    k = 0.5
    best = 0.0
    for d in np.linspace(0, 1 / k, 801)[1:-1]:
        lams = np.linspace(0, 2 * (1 - d * k), 2001)[1:-1]
        ok = lams[[mr.h2(d, lam, s) <= 0 for lam in lams]]
        if ok.size:
            best = max(best, ok.max())
    assert mr.max_rate("lambda2", s).lam == pytest.approx(best, rel=2e-3)


def test_eps_invariance():
    grid = np.geomspace(1e-2, 1e2, 50)
    ref = mr.lambda_curve("lambda2", grid).lambdas
    for eps in (0.1, 1.0, 10.0):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            got = mr.lambda_curve("lambda3", grid, eps=eps).lambdas
        assert max(abs(a - b) for a, b in zip(got, ref)) <= 1e-8


def test_diffusion_limit():
    for s in (0.2, 0.5, 1.0):
        (eps, lam, d), = mr.diffusion_limit_rate(s, [1e-4])
        assert lam == pytest.approx(2 * s * s, rel=1e-2)
        assert d / (2 * (1 + s * s) * eps) == pytest.approx(1.0, rel=2e-2)
    (_, lam1, _), = mr.diffusion_limit_rate(0.5, [1.0])
    assert lam1 == pytest.approx(mr.max_rate("lambda2", 0.5).lam, rel=1e-10)


def test_h_gt_sharp():
    for xi in range(1, 11):
        d, lam = mr.gt_sharp_rate(xi)
        assert lam == 1.0
        assert abs(mr.h_GT(d, lam, xi)) <= 1e-14


def test_curve_validation():
    with pytest.raises(ValueError):
        mr.lambda_curve("lambda2", [])
    with pytest.raises(ValueError):
        mr.lambda_curve("lambda2", [1.0, 0.5])
    with pytest.raises(ValueError):
        mr.max_rate("lambda9", 1.0)


def test_rate_curve_rows():
    c = mr.lambda_curve("lambda2_tilde", [0.5, 1.0])
    rows = c.to_rows()
    assert len(rows) == 2 and rows[1][0] == 1.0
    assert c.s == [0.5, 1.0]


def test_infeasible_mode_error_type():
    assert issubclass(InfeasibleMode, ValueError)
