import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from endotriv.errors import DimensionError, FieldMismatch, NoSolution
from endotriv.gf import (FieldElem, FieldSpec, default_modulus, field_mul, get_field,
                         is_irreducible)

SMALL = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)]


def _brute_irreducible(coeffs, p):
    # no factor of degree <= e/2 by trial division over all monic polynomials
    e = len(coeffs) - 1
    f = list(coeffs)
    for d in range(1, e // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            g = list(tail) + [1]
            r = f[:]
            for i in range(len(r) - 1, d - 1, -1):
                c = r[i]
                if c:
                    for j in range(d + 1):
                        r[i - d + j] = (r[i - d + j] - c * g[j]) % p
            if not any(r[:d]):
                return False
    return True


@pytest.mark.parametrize("p,e,expected", [
    (2, 2, (1, 1, 1)), (2, 3, (1, 1, 0, 1)), (3, 2, (1, 0, 1)),
    (5, 2, (1, 1, 1)), (3, 3, (1, 2, 0, 1)), (7, 2, (3, 1, 1)),
])
def test_modulus_table(p, e, expected):
    assert default_modulus(p, e) == expected
    assert is_irreducible(expected, p)
    assert _brute_irreducible(expected, p)


@pytest.mark.parametrize("p,e", [(2, 4), (3, 4), (11, 2), (2, 1)])
def test_modulus_fallback_irreducible(p, e):
    assert _brute_irreducible(default_modulus(p, e), p)


def test_fieldspec_bounds():
    for bad in [(4, 1), (101, 1), (2, 5), (13, 2)]:
        with pytest.raises(ValueError):
            FieldSpec(*bad)
    with pytest.raises(ValueError):
        FieldSpec(2, 2, (1, 0, 1))
    assert FieldSpec(2, 2).q == 4 and FieldSpec(97).q == 97


def test_field_mul_examples():
    F4 = FieldSpec(2, 2)
    w = FieldElem((0, 1), F4)
    w2 = field_mul(w, w)
    assert field_mul(w, w2).coeffs == (1, 0)
    assert field_mul(FieldElem((2,), FieldSpec(3)), FieldElem((2,), FieldSpec(3))).coeffs == (1,)
    one = FieldElem((1,), FieldSpec(2))
    assert field_mul(one, one).coeffs == (1,)
    with pytest.raises(FieldMismatch):
        field_mul(one, FieldElem((1,), FieldSpec(3)))
    with pytest.raises(ValueError):
        FieldElem((2, 0), F4)


@pytest.mark.parametrize("p,e", [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)])
def test_field_axioms_exhaustive(p, e):
    F = get_field(FieldSpec(p, e))
    q = F.q
    a, b, c = np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij")
    add, mul = F.add, F.mul
    assert np.array_equal(add[add[a, b], c], add[a, add[b, c]])
    assert np.array_equal(mul[mul[a, b], c], mul[a, mul[b, c]])
    assert np.array_equal(mul[a, add[b, c]], add[mul[a, b], mul[a, c]])
    assert np.array_equal(add, add.T) and np.array_equal(mul, mul.T)
    assert all(add[x, F.neg[x]] == 0 for x in range(q))
    assert all(mul[x, F.inv[x]] == 1 for x in range(1, q))
    assert all(mul[x, 1] == x and add[x, 0] == x for x in range(q))


def test_rref_examples():
    F = get_field(3)
    R, r, piv, T = F.rref(F.eye(3))
    assert r == 3 and piv == [0, 1, 2]
    assert F.rank(np.ones((3, 3), dtype=np.int64)) == 1
    assert F.rank(F.zeros(2, 5)) == 0
    M = np.array([[1, 2, 0], [2, 1, 1], [0, 0, 2]])
    R, r, piv, T = F.rref(M)
    assert np.array_equal(R, F.matmul(T, M)) and F.is_invertible(T)


def test_solve_right_examples():
    F = get_field(2)
    B = np.array([[1, 0, 1], [0, 1, 1]])
    assert np.array_equal(F.solve_right(F.eye(2), B), B)
    with pytest.raises(NoSolution):
        F.solve_right(F.zeros(2, 2), np.array([[1], [0]]))
    X = F.solve_right(np.array([[1, 1], [0, 0]]), np.zeros((2, 1), dtype=np.int64))
    assert X.tolist() == [[0], [0]]
    with pytest.raises(DimensionError):
        F.solve_right(F.eye(2), F.zeros(3, 1))


def test_kernel_examples():
    F3, F2 = get_field(3), get_field(2)
    assert F3.kernel_basis(F3.eye(3)).shape == (3, 0)
    assert F3.kernel_basis(np.ones((3, 3), dtype=np.int64)).shape[1] == 2
    assert F2.kernel_basis(np.array([[1, 1]])).tolist() == [[1], [1]]


def test_kron_examples():
    F = get_field(5)
    assert np.array_equal(F.kron(F.eye(2), F.eye(3)), F.eye(6))
    A = np.array([[1, 2], [3, 4]])
    assert np.array_equal(F.kron(A, np.array([[1]])), A)
    assert F.kron(F.zeros(2, 3), F.zeros(4, 5)).shape == (8, 15)
    B = np.array([[0, 1, 2], [2, 2, 0]])
    K = F.kron(A, B)
    assert all(K[i * 2 + r, j * 3 + s] == F.mul[A[i, j], B[r, s]]
               for i in range(2) for j in range(2) for r in range(2) for s in range(3))


def test_inverse_and_left_inverse():
    F = get_field((3, 2))
    rng = np.random.default_rng(0)
    for _ in range(20):
        A = F.random(rng, (5, 5))
        if F.is_invertible(A):
            assert np.array_equal(F.matmul(A, F.inverse(A)), F.eye(5))
        B = F.random(rng, (6, 3))
        if F.rank(B) == 3:
            assert np.array_equal(F.matmul(F.left_inverse(B), B), F.eye(3))
    with pytest.raises(NoSolution):
        F.inverse(F.zeros(2, 2))


def test_power_and_coeffs():
    F = get_field((2, 2))
    for a in range(F.q):
        assert F.from_coeffs(F.to_coeffs(a)) == a
        assert F.power(a, 1) == a
    for a in range(1, F.q):
        assert F.power(a, F.q - 1) == 1
        assert F.mul[a, F.power(a, -1)] == 1


# ---- properties -----------------------------------------------------------

fields = st.sampled_from(SMALL)
dims = st.integers(0, 7)


@settings(max_examples=200, deadline=None)
@given(fields, dims, dims, st.integers(0, 2 ** 32 - 1))
def test_rank_transpose(pe, r, c, seed):
    F = get_field(pe)
    M = F.random(np.random.default_rng(seed), (r, c))
    assert F.rank(M) == F.rank(M.T)


@settings(max_examples=100, deadline=None)
@given(fields, dims, dims, st.integers(0, 2 ** 32 - 1))
def test_kernel_property(pe, r, c, seed):
    F = get_field(pe)
    M = F.random(np.random.default_rng(seed), (r, c))
    K = F.kernel_basis(M)
    assert K.shape[1] == c - F.rank(M)
    assert not F.matmul(M, K).any()
    assert F.rank(K) == K.shape[1]


@settings(max_examples=100, deadline=None)
@given(fields, st.integers(0, 2 ** 32 - 1))
def test_kron_mixed_product(pe, seed):
    F = get_field(pe)
    rng = np.random.default_rng(seed)
    a, b, c, d, e, f = rng.integers(1, 4, size=6)
    A, C = F.random(rng, (a, b)), F.random(rng, (b, c))
    B, D = F.random(rng, (d, e)), F.random(rng, (e, f))
    assert np.array_equal(F.matmul(F.kron(A, B), F.kron(C, D)),
                          F.kron(F.matmul(A, C), F.matmul(B, D)))


@settings(max_examples=100, deadline=None)
@given(fields, dims, dims, st.integers(0, 2 ** 32 - 1))
def test_solve_right_property(pe, r, c, seed):
    F = get_field(pe)
    rng = np.random.default_rng(seed)
    A = F.random(rng, (r, c))
    X0 = F.random(rng, (c, 2))
    B = F.matmul(A, X0)
    X = F.solve_right(A, B)
    assert np.array_equal(F.matmul(A, X), B)
