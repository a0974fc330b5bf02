from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from symplecta.errors import InvariantError
from symplecta.numeric import (
    Gaussian,
    Matrix,
    TolerancePolicy,
    inverse,
    nullspace,
    polar_decompose,
    rank,
    rref,
    signature_by_congruence,
    span_equal,
    standard_omega_np,
    sym_exp,
    sym_log,
)

from helpers import float_symplectic, rational_matrix

small_int = st.integers(min_value=-4, max_value=4)


def _int_matrix(rows, cols):
    return st.lists(st.lists(small_int, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_rank_matches_sympy(rows, cols, data):
    rows_data = data.draw(_int_matrix(rows, cols))
    assert rank(Matrix(rows_data)) == sympy.Matrix(rows_data).rank()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_nullspace_is_kernel(rows, cols, data):
    M = Matrix(data.draw(_int_matrix(rows, cols)))
    N = nullspace(M)
    assert N.cols == cols - rank(M)
    assert (M @ N).is_zero()


def test_rref_matches_sympy():
    rng = np.random.default_rng(3)
    for _ in range(20):
        M = rational_matrix(rng, 3, 5, den=3)
        R, piv = rref(M)
        Rs, pivs = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in M.tolist()]).rref()
        assert tuple(piv) == tuple(pivs)
        assert [[Fraction(int(x.p), int(x.q)) for x in row] for row in Rs.tolist()] == R.tolist()


def test_exact_inverse_is_exact():
    rng = np.random.default_rng(4)
    for _ in range(10):
        M = rational_matrix(rng, 4, 4, den=2)
        if rank(M) < 4:
            continue
        assert M @ inverse(M) == Matrix.eye(4)


def test_exact_computation_is_reproducible():
    rng = np.random.default_rng(5)
    M = rational_matrix(rng, 4, 6)
    assert nullspace(M) == nullspace(M)
    assert rref(M)[0] == rref(M)[0]


def test_gaussian_arithmetic():
    a, b = Gaussian(1, 2), Gaussian(Fraction(1, 2), -1)
    assert a * b == Gaussian(Fraction(5, 2), 0)
    assert (a / a) == Gaussian(1)
    assert a.conjugate() == Gaussian(1, -2)
    assert a.norm2() == 5


def test_signature_real_and_hermitian():
    H = Matrix([[1, 2, 0], [2, 1, 0], [0, 0, 0]])
    assert signature_by_congruence(H) == (1, 1, 1)
    i = Gaussian(0, 1)
    K = Matrix([[0, i], [-i, 0]], "gaussian")
    assert signature_by_congruence(K) == (0, 1, 1)


def test_signature_matches_eigenvalues_on_floats():
    rng = np.random.default_rng(6)
    for _ in range(20):
        A = rng.normal(size=(4, 4))
        A = A + A.T
        w = np.linalg.eigvalsh(A)
        assert signature_by_congruence(Matrix.from_numpy(A)) == (0, int((w > 0).sum()), int((w < 0).sum()))


def test_signature_rejects_non_hermitian():
    with pytest.raises(InvariantError):
        signature_by_congruence(Matrix([[0, 1], [0, 0]]))


def test_float_rank_stable_under_small_perturbation():
    pol = TolerancePolicy()
    rng = np.random.default_rng(7)
    for _ in range(20):
        A = rng.normal(size=(6, 3)) @ rng.normal(size=(3, 5))
        E = rng.normal(size=A.shape)
        E *= pol.rank_tol / 10 / np.abs(E).max()
        assert rank(Matrix.from_numpy(A), pol) == 3
        assert rank(Matrix.from_numpy(A + E), pol) == 3


def test_polar_of_symplectic_stays_in_group():
    rng = np.random.default_rng(8)
    for n in (1, 2, 3):
        om = standard_omega_np(n)
        g = float_symplectic(rng, n)
        u, p = polar_decompose(Matrix.from_numpy(g))
        u, p = u.to_numpy(), p.to_numpy()
        assert np.allclose(u.T @ om @ u, om, atol=1e-10)
        assert np.allclose(om @ p + p.T @ om, 0, atol=1e-10)
        assert np.allclose(u @ sym_exp(p).to_numpy(), g, atol=1e-10)


def test_sym_log_inverts_exp():
    rng = np.random.default_rng(9)
    A = rng.normal(size=(3, 3))
    A = A + A.T
    assert np.allclose(sym_log(sym_exp(A)).to_numpy(), A, atol=1e-10)
    with pytest.raises(InvariantError):
        sym_log(-np.eye(2))


def test_span_equal_on_floats_and_exact():
    A = Matrix([[1, 0], [0, 1], [1, 1]])
    B = A @ Matrix([[2, 1], [1, 1]])
    assert span_equal(A, B)
    assert span_equal(A.to("float"), B.to("float"))
    assert not span_equal(A, Matrix([[1], [0], [0]]))
