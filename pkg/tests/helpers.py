"""Random constructions shared by the test modules."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from symplecta.errors import InvariantError
from symplecta.heisenberg import HeisenbergElement, LeviElement
from symplecta.lagrangian import basepoint_frame, make_lagrangian, make_split, split_basepoint
from symplecta.numeric import Matrix, hstack, rank, standard_omega_np
from symplecta.orbits import standard_subspace
from symplecta.space import OrbitType, Subspace, SymplecticSpace, radical, standard_omega, symplectic_complement

# criterion number -> "criterion N: PASS|FAIL  detail", printed in the terminal summary
ACCEPTANCE = pytest.StashKey[dict]()


def rational_matrix(rng: np.random.Generator, rows: int, cols: int, lo: int = -3, hi: int = 3, den: int = 1) -> Matrix:
    data = [[Fraction(int(rng.integers(lo, hi + 1)), int(rng.integers(1, den + 1))) for _ in range(cols)] for _ in range(rows)]
    return Matrix(data) if rows and cols else Matrix.zeros(rows, cols)


def rational_symmetric(rng: np.random.Generator, k: int, lo: int = -2, hi: int = 2) -> Matrix:
    a = rational_matrix(rng, k, k, lo, hi)
    return a + a.T


def exact_symplectic(rng: np.random.Generator, n: int, steps: int = 3) -> Matrix:
    """Product of exact shears [[1, S], [0, 1]] and [[1, 0], [S, 1]]."""
    g = Matrix.eye(2 * n)
    Z, one = Matrix.zeros(n, n), Matrix.eye(n)
    for k in range(steps):
        S = rational_symmetric(rng, n, -1, 1)
        top = Matrix([[*r1, *r2] for r1, r2 in zip(one.a.tolist(), (S if k % 2 == 0 else Z).a.tolist())])
        bot = Matrix([[*r1, *r2] for r1, r2 in zip((Z if k % 2 == 0 else S).a.tolist(), one.a.tolist())])
        g = g @ Matrix(top.a.tolist() + bot.a.tolist())
    return g


def random_subspace(rng: np.random.Generator, n: int, k: int) -> Subspace:
    V = SymplecticSpace.standard(n)
    while True:
        B = rational_matrix(rng, 2 * n, k)
        if rank(B) == k:
            return Subspace(V, B)


def subspace_of_type(rng: np.random.Generator, t: OrbitType) -> Subspace:
    W = standard_subspace(t)
    g = exact_symplectic(rng, t.n)
    return Subspace.span(W.space, g @ W.basis)


def float_symplectic(rng: np.random.Generator, n: int, scale: float = 0.5) -> np.ndarray:
    """Cayley transform of a random element of sp(2n)."""
    S = rng.normal(size=(2 * n, 2 * n)) * scale
    X = np.linalg.solve(standard_omega_np(n), S + S.T)
    one = np.eye(2 * n)
    return np.linalg.solve(one - X / 2, one + X / 2)


def float_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random element of K = Sp(2n) ∩ O(2n) as [[Re u, -Im u], [Im u, Re u]]."""
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, _ = np.linalg.qr(Z)
    return np.block([[Q.real, -Q.imag], [Q.imag, Q.real]])


def float_space(n: int) -> SymplecticSpace:
    return SymplecticSpace.standard(n, "float")


def float_lagrangian(rng: np.random.Generator, t: OrbitType, scale: float = 0.5):
    g = float_symplectic(rng, t.n, scale)
    F = basepoint_frame(t).to("complex").to_numpy()
    return make_lagrangian(Matrix.from_numpy(g @ F), float_space(t.n))


def float_split(rng: np.random.Generator, t: OrbitType, scale: float = 0.5):
    g = float_symplectic(rng, t.n, scale)
    S = split_basepoint(t)
    a = g @ S.geq0.to("complex").to_numpy()
    b = g @ S.leq0.to("complex").to_numpy()
    return make_split(float_space(t.n), Matrix.from_numpy(a), Matrix.from_numpy(b))


def float_subspace(rng: np.random.Generator, t: OrbitType, scale: float = 0.5) -> Subspace:
    g = float_symplectic(rng, t.n, scale)
    W = standard_subspace(t)
    return Subspace(float_space(t.n), Matrix.from_numpy(g @ W.basis.to_numpy()))


def act(g: np.ndarray, x):
    """g·x for float Subspace, ComplexLagrangian or SplitLagrangian."""
    from symplecta.lagrangian import ComplexLagrangian

    if isinstance(x, Subspace):
        return Subspace(x.space, Matrix.from_numpy(g @ x.basis.to_numpy()))
    if isinstance(x, ComplexLagrangian):
        return make_lagrangian(Matrix.from_numpy(g @ x.frame.to_numpy()), x.space)
    return make_split(x.space, Matrix.from_numpy(g @ x.geq0.to_numpy()), Matrix.from_numpy(g @ x.leq0.to_numpy()))


def gram_rank_type(W: Subspace) -> OrbitType:
    """Type from n0 = dim W - rank of the Gram matrix alone."""
    n0 = W.dim - rank(W.space.gram(W.basis))
    p = (W.dim - n0) // 2
    return OrbitType(n0, p, W.space.n - n0 - p)


def check_adapted(W: Subspace, B) -> None:
    """Gram = Ω and the four span conditions of an adapted Darboux basis."""
    V = W.space
    assert V.gram(B.vectors) == standard_omega(V.n)
    assert Subspace(V, B.e0) == radical(W)
    assert Subspace(V, hstack(B.e0, B.eplus, B.fplus)) == W
    assert Subspace(V, hstack(B.e0, B.eminus, B.fminus)) == symplectic_complement(W)
    assert Subspace(V, hstack(B.e0, B.eplus, B.eminus)).dim == V.n
    assert V.gram(hstack(B.e0, B.eplus, B.eminus)).is_zero()


def random_heisenberg(rng: np.random.Generator, t: OrbitType) -> HeisenbergElement:
    n0, p, m = t
    Ep, Em = rational_matrix(rng, n0, p), rational_matrix(rng, n0, m)
    Fp, Fm = rational_matrix(rng, n0, p), rational_matrix(rng, n0, m)
    S = rational_symmetric(rng, n0) if n0 else Matrix.zeros(0, 0)
    Y = S + Ep @ Fp.T + Em @ Fm.T if n0 else S
    return HeisenbergElement(t, Ep, Em, Fp, Fm, Y)


def random_levi(rng: np.random.Generator, t: OrbitType) -> LeviElement:
    n0, p, m = t
    while True:
        X = rational_matrix(rng, n0, n0)
        try:
            return LeviElement(X, exact_symplectic(rng, p) if p else Matrix.zeros(0, 0), exact_symplectic(rng, m) if m else Matrix.zeros(0, 0))
        except InvariantError:
            continue
