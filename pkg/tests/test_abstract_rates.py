import math

import numpy as np
import pytest

from hyporate import abstract_rates as ar
from hyporate.abstract_rates import AbstractConstants
from hyporate.errors import EmptyFeasibleSet
from hyporate.modal_rates import constants_of_mode


def random_constants(rng, n):
    for _ in range(n):
        yield AbstractConstants(*np.exp(rng.uniform(-2, 2, 3)))


def brute_force_rate(k, nd=400, nl=4000):
    # largest lambda on a grid with h_star <= 0 inside the triangle
    best = 0.0
    for d in np.linspace(0, min(2.0, k.delta_star), nd + 2)[1:-1]:
        top = 2.0 * (k.lambda_m - d)
        if top <= 0:
            continue
        lams = np.linspace(0, top, nl + 2)[1:-1]
        ok = [lam for lam in lams if ar.h_star(d, lam, k) <= 0]
        if ok:
            best = max(best, max(ok))
    return best


def test_invalid_constants():
    with pytest.raises(ValueError):
        AbstractConstants(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        AbstractConstants(1.0, math.inf, 1.0)


def test_bdms_unit_triple():
    t = ar.rate_bdms(AbstractConstants(1, 1, 1))
    assert t.delta == pytest.approx(0.25)
    assert t.lam == pytest.approx(1 / 12)
    assert t.c_minus == pytest.approx((1 - 0.25) / 2)
    assert t.C_factor == pytest.approx(1.25 / 0.75)


def test_bdms_large_lambda_M():
    k = AbstractConstants(1.0, 1e8, 2.0)
    t = ar.rate_bdms(k)
    assert t.lam == pytest.approx(min(1.0, 1.0, 1.0 / 4.0) / 3.0, rel=1e-7)


def test_bdms_delta_scaling_invariance(rng):
    checked = 0
    for k in random_constants(rng, 100):
        c = rng.uniform(0.1, 10)
        k2 = AbstractConstants(c * k.lambda_m, k.lambda_M, math.sqrt(c) * k.C_M)
        third = k.lambda_m * k.K_M / k.C_M ** 2  # unchanged by the scaling
        # the min is invariant unless the bare lambda_m entry is the active one
        if min(k.lambda_m, c * k.lambda_m) >= min(1.0, third):
            assert ar.rate_bdms(k2).delta == pytest.approx(ar.rate_bdms(k).delta, rel=1e-12)
            checked += 1
    assert checked > 20


def test_h_star_identities(rng):
    for k in random_constants(rng, 50):
        lam = rng.uniform(0, 2 * k.lambda_m)
        assert ar.h_star(0.0, lam, k) == pytest.approx(lam * (2 * k.lambda_m - lam), rel=1e-12, abs=1e-14)
        d = rng.uniform(0, k.lambda_m)
        top = 2 * (k.lambda_m - d)
        assert ar.h_star(d, top, k) == pytest.approx((k.C_M + k.lambda_m - d) ** 2 * d * d, rel=1e-10)
        assert ar.h_star(d, 0.0, k) / d == pytest.approx(
            (k.C_M ** 2 + 4 * k.K_M) * d - 4 * k.K_M * k.lambda_m, rel=1e-9, abs=1e-12)


def test_lambda_star_root_residual():
    k = AbstractConstants(1, 1, 1)
    d = k.delta_star / 2
    lam = ar.lambda_star(d, k)
    assert lam > 0
    assert abs(ar.h_star(d, lam, k)) <= 1e-12


def test_lambda_star_small_delta():
    k = AbstractConstants(1, 1, 1)
    assert ar.lambda_star(1e-9, k) < 1e-8


def test_lambda_star_errors():
    k = AbstractConstants(1, 1, 1)
    with pytest.raises(EmptyFeasibleSet):
        ar.lambda_star(k.delta_star, k)
    with pytest.raises(EmptyFeasibleSet):
        ar.lambda_star(0.0, k)


def test_lambda_star_in_triangle(rng):
    n = 0
    while n < 200:
        k = next(random_constants(rng, 1))
        d = rng.uniform(0, min(k.delta_star, k.lambda_m))
        if d == 0:
            continue
        lam = ar.lambda_star(d, k)
        assert 0 < lam <= 2 * (k.lambda_m - d)
        assert ar.h_star(d, lam, k) <= 1e-10
        n += 1


def test_optimize_dominates_bdms(rng):
    for k in random_constants(rng, 500):
        t = ar.optimize_rate(k, iters=60, starts=8)
        assert t.lam >= ar.rate_bdms(k).lam
        assert ar.h_star(t.delta, t.lam, k) <= 1e-10
        assert t.lam < 2 * (k.lambda_m - t.delta)


@pytest.mark.parametrize("triple", [(1, 1, 1), (1, 25, 5 * (1 + 5 * math.sqrt(3)) / 26), (0.3, 2, 4), (2, 0.1, 0.5)])
def test_optimize_against_brute_force(triple):
    k = AbstractConstants(*triple)
    t = ar.optimize_rate(k)
    ref = brute_force_rate(k, 300, 3000)
    assert t.lam >= ref - 1e-9
    assert t.lam <= ref * (1 + 1e-2) + 1e-6


def test_optimize_stationary_point_s5():
    k = constants_of_mode(5.0)
    t = ar.optimize_rate(k)
    h = 1e-4
    assert ar.lambda_star(t.delta - h, k) <= t.lam + 1e-12
    assert ar.lambda_star(t.delta + h, k) <= t.lam + 1e-12


def test_improved_twist_constants():
    t = ar.improved_twist(0.4, 0.1)
    assert t.c_minus == pytest.approx(0.4)
    assert t.c_plus == pytest.approx(0.6)
    assert t.C_factor == pytest.approx(ar.C_star(0.4))


def test_unimodal_on_ex_family():
    for s in (0.1, 1.0, 5.0, 50.0):
        k = constants_of_mode(s)
        ds = np.linspace(0, min(2, k.delta_star), 402)[1:-1]
        vals = np.array([ar.lambda_star(d, k) for d in ds])
        j = int(np.argmax(vals))
        assert np.all(np.diff(vals[: j + 1]) >= -1e-14)
        assert np.all(np.diff(vals[j:]) <= 1e-14)
