from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symplecta.errors import InvariantError
from symplecta.numeric import Matrix, TolerancePolicy
from symplecta.orbits import standard_subspace
from symplecta.space import (
    OrbitType,
    Subspace,
    SymplecticSpace,
    all_types,
    check_compatible_J,
    radical,
    reduce_at,
    standard_J,
    subspace_type,
    symplectic_complement,
)

from helpers import exact_symplectic, gram_rank_type, random_subspace


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.data())
def test_complement_swaps_plus_and_minus(n, data):
    k = data.draw(st.integers(0, 2 * n))
    W = random_subspace(np.random.default_rng(data.draw(st.integers(0, 10**6))), n, k)
    t = subspace_type(W)
    assert subspace_type(symplectic_complement(W)) == t.swapped()
    assert symplectic_complement(symplectic_complement(W)) == W


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 10**6), st.data())
def test_type_is_symplectic_invariant(n, seed, data):
    rng = np.random.default_rng(seed)
    W = random_subspace(rng, n, data.draw(st.integers(1, 2 * n)))
    g = exact_symplectic(rng, n)
    assert W.space.is_symplectic(g)
    assert subspace_type(W.image(g)) == subspace_type(W)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_coordinate_subspaces_realize_every_type(n):
    seen = {subspace_type(standard_subspace(t)) for t in all_types(n)}
    assert seen == set(all_types(n))
    for ell in range(2 * n + 1):
        layer = [t for t in all_types(n) if t.n0 + 2 * t.nplus == ell]
        assert layer and all(standard_subspace(t).dim == ell for t in layer)


def test_type_matches_gram_rank_on_random_subspaces():
    rng = np.random.default_rng(11)
    for n in (1, 2, 3):
        for _ in range(30):
            W = random_subspace(rng, n, int(rng.integers(0, 2 * n + 1)))
            assert subspace_type(W) == gram_rank_type(W)


def test_orbit_type_validation():
    with pytest.raises(InvariantError):
        OrbitType.of(-1, 1, 1)
    t = OrbitType.of(1, 2, 0)
    assert t.n == 3 and t.coisotropic and not t.isotropic
    assert OrbitType.of(2, 0, 0).lagrangian


def test_standard_J_is_compatible():
    for n in (1, 2, 3):
        V = SymplecticSpace.standard(n)
        J = check_compatible_J(standard_J(n), V)
        assert J.J == standard_J(n)


def test_compatible_J_rejects_bad_inputs():
    V = SymplecticSpace.standard(1)
    with pytest.raises(InvariantError):
        check_compatible_J(Matrix([[0, 1], [-1, 0]]), V)
    with pytest.raises(InvariantError):
        check_compatible_J(Matrix([[1, 0], [0, 1]]), V)
    with pytest.raises(InvariantError):
        check_compatible_J(Matrix([[0, -2], [1, 0]]), V)


def test_nonstandard_form_space():
    with pytest.raises(InvariantError):
        SymplecticSpace(1, Matrix([[0, 1], [1, 0]]))
    with pytest.raises(InvariantError):
        SymplecticSpace(2, Matrix([[0, -1], [1, 0]]))


def test_reduction_exact_and_with_J():
    rng = np.random.default_rng(12)
    for t in [OrbitType(1, 1, 1), OrbitType(2, 1, 0), OrbitType(1, 0, 2)]:
        W = standard_subspace(t)
        W0 = radical(W)
        R = reduce_at(W0)
        assert R.m == t.n - t.n0
        Wt = R.reduced_subspace(W)
        assert subspace_type(Wt) == OrbitType(0, t.nplus, t.nminus)
        assert R.lift_subspace(Wt) == W
        g = exact_symplectic(rng, t.n)
        W2 = W.image(g)
        R2 = reduce_at(radical(W2))
        assert subspace_type(R2.reduced_subspace(W2)) == OrbitType(0, t.nplus, t.nminus)
        RJ = reduce_at(W0.to("float"), check_compatible_J(standard_J(t.n), W.space))
        assert RJ.compatible_J is not None
        assert subspace_type(RJ.reduced_subspace(W.to("float"))) == OrbitType(0, t.nplus, t.nminus)


def test_reduction_needs_isotropic():
    W = standard_subspace(OrbitType(0, 1, 0))
    with pytest.raises(InvariantError):
        reduce_at(W)


def test_float_type_with_policy():
    rng = np.random.default_rng(13)
    pol = TolerancePolicy()
    for t in all_types(3):
        W = standard_subspace(t)
        g = exact_symplectic(rng, 3).to_numpy().astype(float)
        Wf = Subspace(SymplecticSpace.standard(3, "float"), Matrix.from_numpy(g @ W.basis.to_numpy().astype(float)))
        assert subspace_type(Wf, pol) == t
