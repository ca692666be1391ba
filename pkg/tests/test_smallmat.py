import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyporate import smallmat as sm
from hyporate.errors import NotHermitian, NotPositiveDefinite

scipy_linalg = pytest.importorskip("scipy.linalg")


def random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def test_identity_spectrum():
    assert np.allclose(sm.eig_hermitian(np.eye(2)), [1.0, 1.0])


def test_p1_spectrum():
    P = np.array([[1, -0.5j], [0.5j, 1]])
    assert np.allclose(sm.eig_hermitian(P), [0.5, 1.5], atol=1e-15)


def test_ptilde_half_spectrum():
    a = 2 * 0.5 / (1 + 4 * 0.25)
    P = np.array([[1, -1j * a], [1j * a, 1]])
    assert np.allclose(sm.eig_hermitian(P), [0.5, 1.5], atol=1e-15)
    assert sm.condition_number(P) == pytest.approx(3.0, abs=1e-14)


def test_not_hermitian():
    with pytest.raises(NotHermitian):
        sm.eig_hermitian(np.array([[1, 2], [0, 1]]))


def test_not_positive_definite():
    with pytest.raises(NotPositiveDefinite):
        sm.condition_number(np.array([[1, 0], [0, -1]]))


@pytest.mark.parametrize("n", [2, 3, 5, 8, 16])
def test_hermitian_against_scipy(rng, n):
    a = random_complex(rng, n)
    h = a + a.conj().T
    w, v = sm.eig_hermitian(h, vectors=True)
    assert np.allclose(w, scipy_linalg.eigvalsh(h), atol=1e-10)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, h, atol=1e-10)


@pytest.mark.parametrize("n", [2, 3, 4, 7, 12, 16])
def test_general_against_scipy(rng, n):
    a = random_complex(rng, n)
    res = sm.eig_general(a)
    ref = scipy_linalg.eigvals(a)
    got = np.array(sorted(res.values, key=lambda z: (round(z.real, 6), z.imag)))
    exp = np.array(sorted(ref, key=lambda z: (round(z.real, 6), z.imag)))
    assert np.allclose(got, exp, atol=1e-8)
    assert abs(sum(res.values) - np.trace(a)) <= 1e-10 * max(1.0, np.abs(a).sum())
    assert not res.any_defective


def test_gt_matrix_eigenvalues():
    C = np.array([[0, 1j], [1j, 1]])
    res = sm.eig_general(C)
    exp = sorted([0.5 + 1j * math.sqrt(3) / 2, 0.5 - 1j * math.sqrt(3) / 2], key=lambda z: z.imag)
    assert np.allclose(sorted(res.values, key=lambda z: z.imag), exp, atol=1e-14)
    assert res.defect_flags == (False, False)


def test_defective_gt_matrix():
    C = np.array([[0, 1j], [1j, 2]])
    res = sm.eig_general(C)
    assert np.allclose(res.values, [1, 1], atol=1e-7)
    assert all(res.defect_flags)


def test_zero_matrix_not_defective():
    # geometric multiplicity of 0 equals the dimension
    res = sm.eig_general(np.zeros((3, 3)))
    assert np.allclose(res.values, 0)
    assert not res.any_defective


def test_jordan_block_defective():
    J = np.array([[2, 1, 0], [0, 2, 1], [0, 0, 2]], dtype=complex)
    assert sm.eig_general(J).any_defective


@pytest.mark.parametrize("xi,sigma,t", [(1, 1, 0.7), (1, 2, 3.0), (0.3, 4, 1.5), (5, 1, 0.2), (0.5, 1, 1e-6), (0, 1, 5)])
def test_expm_2x2_against_scipy(xi, sigma, t):
    C = np.array([[0, 1j * xi], [1j * xi, sigma]])
    assert np.allclose(sm.expm_2x2(C, t), scipy_linalg.expm(-C * t), atol=1e-13)


def test_expm_2x2_generic(rng):
    for _ in range(50):
        C = random_complex(rng, 2)
        t = rng.uniform(0, 2)
        ref = scipy_linalg.expm(-C * t)
        assert np.allclose(sm.expm_2x2(C, t), ref, atol=1e-11 * max(1, np.abs(ref).max()))


def test_operator_norm_sq(rng):
    for n in (2, 4):
        m = random_complex(rng, n)
        assert sm.operator_norm_sq(m) == pytest.approx(scipy_linalg.norm(m, 2) ** 2, rel=1e-10)


def test_solve_and_cholesky(rng):
    a = random_complex(rng, 6)
    b = rng.standard_normal(6) + 0j
    assert np.allclose(a @ sm.solve(a, b), b, atol=1e-10)
    p = a @ a.conj().T + np.eye(6)
    low = sm.cholesky(p)
    assert np.allclose(low @ low.conj().T, p, atol=1e-10)


def test_eigenspace_gt(rng):
    C = np.array([[0, 1j], [1j, 1]])
    lam = 0.5 + 1j * math.sqrt(3) / 2
    v = sm.eigenspace(C, lam)[:, 0]
    assert np.allclose(C @ v, lam * v, atol=1e-12)


def test_predicates():
    a = np.array([[1, 2 + 1j], [2 - 1j, 3]])
    assert sm.is_hermitian(a)
    assert sm.is_anti_hermitian(1j * a)
    assert np.allclose(sm.hermitian_part(a) + sm.anti_hermitian_part(a), a)


def test_dimension_limit():
    with pytest.raises(ValueError):
        sm.eig_general(np.eye(17))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=3, max_size=3))
def test_hermitian_2x2_property(vals):
    a, b, c = vals
    h = np.array([[a, b + 0.5j * c], [b - 0.5j * c, -a + c]])
    w = sm.eig_hermitian(h)
    assert w[0] <= w[1]
    assert w.sum() == pytest.approx(np.trace(h).real, abs=1e-9)
