"""Adapted Darboux bases, J-unitary bases, J-invariant complements and transporters.

Adapted bases are ordered ``[e0 e+ e- f0 f+ f-]`` with block sizes
``(n0, n+, n-)`` twice, so that for a subspace W of type (n0, n+, n-):

* ``W ∩ W^ω = span{e0}``,
* ``W = span{e0, e+, f+}``,
* ``W^ω = span{e0, e-, f-}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantError
from .numeric import (
    Matrix,
    TolerancePolicy,
    contains_columns,
    default_policy,
    extend_basis,
    hstack,
    inverse,
    nullspace,
    rank,
    same_backend,
)
from .space import (
    CompatibleJ,
    OrbitType,
    Subspace,
    SymplecticSpace,
    g_orthonormalize,
    intersect,
    is_isotropic,
    radical,
    standard_omega,
    subspace_type,
    sum_subspaces,
    symplectic_complement,
    unitary_orthonormalize,
)


@dataclass(frozen=True, eq=False)
class AssociatedSplitting:
    """W+ ⊕ W- ⊕ W^0 completing the radical of W to a splitting of V.

    W+ is complementary to the radical in W, W- is complementary to it in
    W^ω, and W^0 is isotropic and complementary to it in (W+ ⊕ W-)^ω.
    """

    Wplus: Subspace
    Wminus: Subspace
    W0comp: Subspace


@dataclass(frozen=True, eq=False)
class DarbouxBasis:
    vectors: Matrix
    labels: OrbitType

    @property
    def n(self) -> int:
        return self.labels.n

    def _cols(self, start: int, size: int) -> Matrix:
        return self.vectors.columns(range(start, start + size))

    @property
    def e0(self) -> Matrix:
        return self._cols(0, self.labels.n0)

    @property
    def eplus(self) -> Matrix:
        return self._cols(self.labels.n0, self.labels.nplus)

    @property
    def eminus(self) -> Matrix:
        return self._cols(self.labels.n0 + self.labels.nplus, self.labels.nminus)

    @property
    def f0(self) -> Matrix:
        return self._cols(self.n, self.labels.n0)

    @property
    def fplus(self) -> Matrix:
        return self._cols(self.n + self.labels.n0, self.labels.nplus)

    @property
    def fminus(self) -> Matrix:
        return self._cols(self.n + self.labels.n0 + self.labels.nplus, self.labels.nminus)

    def splitting(self, space: SymplecticSpace) -> AssociatedSplitting:
        """The associated splitting read off from the blocks."""
        return AssociatedSplitting(
            Subspace(space, hstack(self.eplus, self.fplus)),
            Subspace(space, hstack(self.eminus, self.fminus)),
            Subspace(space, self.f0),
        )


def symplectic_gram_schmidt(
    V: SymplecticSpace, S: Matrix, pol: TolerancePolicy | None = None
) -> tuple[Matrix, Matrix]:
    """Darboux pairs (E, F) with ω(e_i, f_j) = δ_ij for the symplectic span of S.

    Exact inputs take the first column (input order) that pairs nontrivially
    with a later one; float inputs take the partner of largest |ω|.
    """
    pol = pol or default_policy()
    cols = [S.col(j) for j in range(S.cols)]
    exact = S.is_exact
    tol = pol.rank_tol * max(1.0, S.scale()) ** 2
    es: list[Matrix] = []
    fs: list[Matrix] = []
    while cols:
        found = None
        for i, e in enumerate(cols):
            vals = [(j, V.pair(e, u)) for j, u in enumerate(cols) if j != i]
            if exact:
                hit = next(((j, w) for j, w in vals if w), None)
            else:
                hit = max(vals, key=lambda t: abs(t[1]), default=None)
                if hit is not None and abs(hit[1]) <= tol:
                    hit = None
            if hit is not None:
                found = (i, hit[0], hit[1])
                break
        if found is None:
            break
        i, j, w = found
        e, f = cols[i], cols[j] / w
        rest = [c for k, c in enumerate(cols) if k not in (i, j)]
        cols = [u + e * V.pair(f, u) - f * V.pair(e, u) for u in rest]
        if not exact:
            cols = [u for u in cols if u.norm() > pol.rank_tol * max(1.0, S.scale())]
        es.append(e)
        fs.append(f)
    if any(not c.is_zero(pol) for c in cols):
        raise InvariantError("span is not symplectic")
    empty = Matrix.zeros(S.rows, 0, S.backend)
    E = hstack(*es) if es else empty
    F = hstack(*fs) if fs else empty
    return E, F


def _lagrangian_complement(V: SymplecticSpace, e0: Matrix, c: Matrix, pol: TolerancePolicy | None) -> Matrix:
    """Isotropic f0 inside span(e0, c) with ω(e0_i, f0_j) = δ_ij.

    Solves against the pairing M_ij = ω(e0_i, c_j), then removes the
    antisymmetric self-pairing by adding half of it along e0.
    """
    if e0.cols == 0:
        return e0
    M = V.pairing(e0, c)
    fp = c @ inverse(M, pol)
    S = V.pairing(fp, fp)
    return fp + e0 @ (S / 2)


def check_splitting(W: Subspace, split: AssociatedSplitting, pol: TolerancePolicy | None = None) -> None:
    """Raise InvariantError unless ``split`` is associated to W."""
    t = subspace_type(W, pol)
    W0 = radical(W, pol)
    Wom = symplectic_complement(W, pol)
    Wp, Wm, Wc = split.Wplus, split.Wminus, split.W0comp
    if Wp.dim != 2 * t.nplus or not W.contains_subspace(Wp) or intersect(Wp, W0, pol).dim:
        raise InvariantError("W+ is not complementary to the radical in W")
    if Wm.dim != 2 * t.nminus or not Wom.contains_subspace(Wm) or intersect(Wm, W0, pol).dim:
        raise InvariantError("W- is not complementary to the radical in W^ω")
    if Wc.dim != t.n0 or not is_isotropic(Wc, pol):
        raise InvariantError("W^0 is not isotropic of the radical's dimension")
    U = symplectic_complement(sum_subspaces(Wp, Wm), pol) if (Wp.dim + Wm.dim) else None
    if U is not None and not U.contains_subspace(Wc):
        raise InvariantError("W^0 is not ω-orthogonal to W+ ⊕ W-")
    if intersect(Wc, W0, pol).dim:
        raise InvariantError("W^0 meets the radical")


def darboux_extend(
    W: Subspace, split: AssociatedSplitting | None = None, pol: TolerancePolicy | None = None
) -> DarbouxBasis:
    """Darboux basis adapted to W (and to ``split`` when given).

    The default splitting completes the radical by elimination against the
    columns of W and W^ω in order; W^0 is built inside (W+ ⊕ W-)^ω.
    """
    pol = pol or default_policy()
    V = W.space
    W0 = radical(W, pol)
    Wom = symplectic_complement(W, pol)
    t = subspace_type(W, pol)
    e0 = W0.basis
    if split is None:
        wp = extend_basis(e0, W.basis, pol)
        wm = extend_basis(e0, Wom.basis, pol)
    else:
        check_splitting(W, split, pol)
        e0, wp, wm = same_backend(e0, split.Wplus.basis, split.Wminus.basis)
    Ep, Fp = symplectic_gram_schmidt(V, wp, pol)
    Em, Fm = symplectic_gram_schmidt(V, wm, pol)
    if split is None:
        pm = hstack(Ep, Fp, Em, Fm)
        U = symplectic_complement(Subspace(V, pm), pol).basis if pm.cols else Matrix.eye(V.dim, e0.backend)
        c = extend_basis(e0, U, pol)
    else:
        c = split.W0comp.basis
    e0, Ep, Fp, Em, Fm, c = same_backend(e0, Ep, Fp, Em, Fm, c)
    f0 = _lagrangian_complement(V, e0, c, pol)
    B = hstack(*same_backend(e0, Ep, Em, f0, Fp, Fm))
    _assert_darboux(V, B, pol)
    return DarbouxBasis(B, t)


def _assert_darboux(V: SymplecticSpace, B: Matrix, pol: TolerancePolicy) -> None:
    if B.shape != (V.dim, V.dim):
        raise InvariantError("adapted basis has the wrong size")
    om = standard_omega(V.n, B.backend)
    G = V.gram(B)
    if B.is_exact:
        if G != om:
            raise InvariantError("adapted basis is not Darboux")
    elif (G - om).norm() > 1e3 * pol.residual_tol * max(1.0, B.scale()) ** 2:
        raise InvariantError(f"adapted basis is not Darboux (residual {(G - om).norm():.3e})")


def _common_backend(W: Subspace, J: CompatibleJ) -> str:
    return "rational" if (W.basis.is_exact and J.J.is_exact) else "float"


def _J_on(J: CompatibleJ, backend: str) -> Matrix:
    return J.J if J.J.backend == backend else J.J.to(backend)


def in_gr_J(W: Subspace, J: CompatibleJ, pol: TolerancePolicy | None = None) -> bool:
    """Whether W + J(W ∩ W^ω) is J-invariant."""
    b = _common_backend(W, J)
    Jm = _J_on(J, b)
    Wb = W.basis if W.backend == b else W.basis.to(b)
    W0 = radical(Subspace(W.space, Wb), pol)
    S = hstack(Wb, Jm @ W0.basis)
    return contains_columns(S, Jm @ S, pol)


def j_invariant_complement(W: Subspace, J: CompatibleJ, pol: TolerancePolicy | None = None) -> Subspace:
    """The g-orthogonal complement of W ∩ W^ω inside W, g = ω(·, J·).

    Requires W + J(W ∩ W^ω) to be J-invariant; the result is then the unique
    J-invariant complement of the radical in W.
    """
    pol = pol or default_policy()
    if not in_gr_J(W, J, pol):
        raise InvariantError("W + J(W ∩ W^ω) is not J-invariant")
    b = _common_backend(W, J)
    Jm = _J_on(J, b)
    Wb = W.basis if W.backend == b else W.basis.to(b)
    V = W.space
    W0 = radical(Subspace(V, Wb), pol)
    if W0.dim == 0:
        return Subspace(V, Wb)
    om = V.form(b)
    cond = (Jm @ W0.basis).T @ om @ Wb
    C = Wb @ nullspace(cond, pol)
    if C.cols + W0.dim != W.dim:
        raise InvariantError("complement has the wrong dimension")
    if C.cols and not contains_columns(C, Jm @ C, pol):
        raise InvariantError("complement is not J-invariant")
    return Subspace(V, C)


def coisotropic_unitary_darboux(W: Subspace, J: CompatibleJ, pol: TolerancePolicy | None = None) -> DarbouxBasis:
    """Basis {e, Je} with W^ω = span{e_j : j <= n0} and W = span{e, Je_l : l > n0}."""
    pol = pol or default_policy()
    t = subspace_type(W, pol)
    if t.nminus:
        raise InvariantError("coisotropic_unitary_darboux needs a coisotropic subspace")
    V = W.space
    W0 = radical(W, pol)
    e_rad = g_orthonormalize(J, W0.basis, pol)
    rest = j_invariant_complement(W, J, pol)
    e_rest = unitary_orthonormalize(J, rest.basis, t.nplus, pol) if t.nplus else np.zeros((V.dim, 0))
    E = np.hstack([e_rad, e_rest])
    Jn = J.J.to_numpy()
    B = Matrix.from_numpy(np.hstack([E, Jn @ E]))
    _assert_darboux(V, B, pol)
    return DarbouxBasis(B, OrbitType(t.n0, t.nplus, 0))


@dataclass(frozen=True, eq=False)
class JSplitting:
    """Mutually g-orthogonal J-invariant pieces W0 ⊕ JW0, W+^J, W-^J and an adapted basis.

    W = W0 ⊕ W+^J and W^ω = W0 ⊕ W-^J. The basis is ``[e0 e+ e- Je0 Je+ Je-]``.
    """

    radical_part: Subspace
    Wplus: Subspace
    Wminus: Subspace
    basis: DarbouxBasis


def j_splitting(W: Subspace, J: CompatibleJ, pol: TolerancePolicy | None = None) -> JSplitting:
    pol = pol or default_policy()
    V = W.space
    t = subspace_type(W, pol)
    Wp = j_invariant_complement(W, J, pol)
    Wm = j_invariant_complement(symplectic_complement(W, pol), J, pol)
    W0 = radical(W, pol)
    Jn = J.J.to_numpy()
    e0 = g_orthonormalize(J, W0.basis, pol)
    ep = unitary_orthonormalize(J, Wp.basis, t.nplus, pol) if t.nplus else np.zeros((V.dim, 0))
    em = unitary_orthonormalize(J, Wm.basis, t.nminus, pol) if t.nminus else np.zeros((V.dim, 0))
    E = np.hstack([e0, ep, em])
    B = Matrix.from_numpy(np.hstack([E, Jn @ E]))
    _assert_darboux(V, B, pol)
    rad = Subspace.span(V, Matrix.from_numpy(np.hstack([e0, Jn @ e0]))) if t.n0 else Subspace.zero(V, "float")
    return JSplitting(rad, Wp, Wm, DarbouxBasis(B, t))


def transporter(W: Subspace, W2: Subspace, pol: TolerancePolicy | None = None) -> Matrix:
    """Symplectic g mapping the adapted basis of W to that of W2, so gW = W2."""
    pol = pol or default_policy()
    if W.space.n != W2.space.n:
        raise InvariantError("subspaces live in different spaces")
    if subspace_type(W, pol) != subspace_type(W2, pol):
        raise InvariantError("transporter needs subspaces of the same type")
    B1 = darboux_extend(W, pol=pol).vectors
    B2 = darboux_extend(W2, pol=pol).vectors
    B1, B2 = same_backend(B1, B2)
    return B2 @ inverse(B1, pol)


def is_darboux(V: SymplecticSpace, B: Matrix, pol: TolerancePolicy | None = None) -> bool:
    try:
        _assert_darboux(V, B, pol or default_policy())
    except InvariantError:
        return False
    return rank(B, pol) == V.dim
