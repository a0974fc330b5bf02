"""Complex Lagrangian subspaces of the complexified space.

A complex Lagrangian F is the span of a 2n×n frame ``[Q; P]`` with
``Fᵗ Ω F = 0``. Its type is the inertia of the hermitian form
``κ(v, w) = -i ω(v, w̄)``. The Gram matrix of κ on a frame is ``-i F^H Ω F``;
for n = 1 and the frame ``[q; p]`` this is ``2 Im(q p̄)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .darboux import DarbouxBasis, _assert_darboux, _lagrangian_complement
from .errors import InvariantError
from .numeric import (
    EXACT,
    Gaussian,
    Matrix,
    TolerancePolicy,
    canonical_span,
    column_basis,
    default_policy,
    extend_basis,
    hstack,
    intersect_columns,
    orthonormal_basis,
    rank,
    same_backend,
    signature_by_congruence,
    span_equal,
)
from .space import (
    CompatibleJ,
    OrbitType,
    Subspace,
    SymplecticSpace,
    check_compatible_J,
    standard_J,
    symplectic_complement,
)

_I = Gaussian(0, 1)


def complex_backend(backend: str) -> str:
    return "gaussian" if backend in EXACT else "complex"


def as_complex(M: Matrix) -> Matrix:
    return M.to(complex_backend(M.backend))


def _imag_unit(backend: str):
    return _I if backend == "gaussian" else 1j


def kappa_gram(V: SymplecticSpace, F: Matrix) -> Matrix:
    """Hermitian Gram matrix -i F^H Ω F of κ on the columns of F."""
    F = as_complex(F)
    om = V.form(F.backend)
    return (F.H @ om @ F) * (-_imag_unit(F.backend))


def kappa_cross(V: SymplecticSpace, A: Matrix, B: Matrix) -> Matrix:
    """Matrix -i A^H Ω B of κ between two frames."""
    A, B = same_backend(as_complex(A), as_complex(B))
    return (A.H @ V.form(A.backend) @ B) * (-_imag_unit(A.backend))


@dataclass(frozen=True, eq=False)
class ComplexLagrangian:
    space: SymplecticSpace
    frame: Matrix

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def backend(self) -> str:
        return self.frame.backend

    def __eq__(self, other):
        if not isinstance(other, ComplexLagrangian):
            return NotImplemented
        return self.n == other.n and span_equal(self.frame, other.frame)

    __hash__ = None

    def conj(self) -> ComplexLagrangian:
        return ComplexLagrangian(self.space, self.frame.conj())

    def __repr__(self):
        return f"ComplexLagrangian(n={self.n}, backend={self.backend})"


def make_lagrangian(frame: Matrix, space: SymplecticSpace | None = None, pol: TolerancePolicy | None = None) -> ComplexLagrangian:
    """Validate a 2n×n frame and return it canonicalized.

    Exact frames are put in reduced column echelon form; float frames are
    replaced by an orthonormal basis of their span.
    """
    pol = pol or default_policy()
    F = as_complex(frame)
    if F.rows % 2 or F.rows == 0:
        raise InvariantError("frame must have 2n rows")
    n = F.rows // 2
    space = space or SymplecticSpace.standard(n, "rational" if F.is_exact else "float")
    if space.n != n:
        raise InvariantError("frame does not match the space")
    if rank(F, pol) != n:
        raise InvariantError(f"frame must have rank {n}")
    iso = F.T @ space.form(F.backend) @ F
    if not iso.is_zero(pol):
        raise InvariantError("Lagrangian condition Qᵗ P = Pᵗ Q fails")
    if F.is_exact:
        F = canonical_span(column_basis(F))
    else:
        F = Matrix.from_numpy(orthonormal_basis(F, pol).astype(complex))
    return ComplexLagrangian(space, F)


def complexify(L: Subspace) -> ComplexLagrangian:
    """L^ℂ for a real Lagrangian L."""
    return make_lagrangian(as_complex(L.basis), L.space)


def lag_type(F: ComplexLagrangian, pol: TolerancePolicy | None = None) -> OrbitType:
    """Inertia of κ on F, as (zero, positive, negative) counts."""
    return OrbitType(*signature_by_congruence(kappa_gram(F.space, F.frame), pol))


def mobius_act(g: Matrix, F: ComplexLagrangian, pol: TolerancePolicy | None = None) -> ComplexLagrangian:
    """g·F for a real symplectic g."""
    if g.is_complex:
        raise InvariantError("the group acts by real symplectic matrices")
    F.space.check_symplectic(g if F.space.omega.is_exact or not g.is_exact else g.to("float"), pol)
    g2, Fr = same_backend(as_complex(g), F.frame)
    return make_lagrangian(g2 @ Fr, F.space, pol)


def siegel_frame(Z: Matrix) -> Matrix:
    """Graph frame [Z; 1] of a symmetric complex n×n matrix."""
    Z = as_complex(Z)
    return hstack(Z.T, Matrix.eye(Z.rows, Z.backend)).T


def siegel_act(g: Matrix, Z: Matrix) -> Matrix:
    """(A Z + B)(C Z + D)⁻¹ for g = [[A, B], [C, D]]."""
    from .numeric import inverse

    n = Z.rows
    gc, Zc = same_backend(as_complex(g), as_complex(Z))
    A, B = gc[:n, :n], gc[:n, n:]
    C, D = gc[n:, :n], gc[n:, n:]
    return (A @ Zc + B) @ inverse(C @ Zc + D)


def kernel_frame(F: ComplexLagrangian, pol: TolerancePolicy | None = None) -> Matrix:
    """Frame of F0 = F ∩ F̄, the κ-kernel of F."""
    return intersect_columns(F.frame, F.frame.conj(), pol)


def real_span(V: SymplecticSpace, F: Matrix, pol: TolerancePolicy | None = None) -> Subspace:
    """Real subspace spanned by real and imaginary parts of the columns of F."""
    if F.cols == 0:
        return Subspace.zero(V, "rational" if F.is_exact else "float")
    return Subspace.span(V, hstack(F.real(), F.imag()))


def real_projection(F: ComplexLagrangian, pol: TolerancePolicy | None = None) -> tuple[Subspace, Subspace]:
    """(Re F, Re F0); Re F0 = (Re F)^ω and dim Re F = 2n - n0."""
    ReF = real_span(F.space, F.frame, pol)
    ReF0 = real_span(F.space, kernel_frame(F, pol), pol)
    n0 = ReF0.dim
    if ReF.dim != 2 * F.n - n0 or not (symplectic_complement(ReF, pol) == ReF0):
        raise InvariantError("real projection identities fail")
    return ReF, ReF0


# ---------------------------------------------------------------- splittings


@dataclass(frozen=True, eq=False)
class SplitLagrangian:
    """A complex Lagrangian with a κ-orthogonal splitting, stored as the pair
    (F0 ⊕ F+, F0 ⊕ F-) of frames.
    """

    space: SymplecticSpace
    geq0: Matrix
    leq0: Matrix

    @property
    def n(self) -> int:
        return self.space.n

    def lagrangian(self, pol: TolerancePolicy | None = None) -> ComplexLagrangian:
        a, b = same_backend(self.geq0, self.leq0)
        return make_lagrangian(column_basis(hstack(a, b), pol), self.space, pol)

    def __eq__(self, other):
        if not isinstance(other, SplitLagrangian):
            return NotImplemented
        return span_equal(self.geq0, other.geq0) and span_equal(self.leq0, other.leq0)

    __hash__ = None

    def __repr__(self):
        return f"SplitLagrangian(n={self.n}, dims=({self.geq0.cols}, {self.leq0.cols}))"


def make_split(V: SymplecticSpace, geq0: Matrix, leq0: Matrix, pol: TolerancePolicy | None = None) -> SplitLagrangian:
    """Validate and canonicalize a splitting pair."""
    pol = pol or default_policy()
    a, b = same_backend(as_complex(geq0), as_complex(leq0))
    a, b = column_basis(a, pol), column_basis(b, pol)
    F0 = intersect_columns(a, b, pol)
    n0 = F0.cols
    F = make_lagrangian(hstack(a, b), V, pol)
    if a.cols + b.cols - n0 != V.n:
        raise InvariantError("splitting pieces do not span a Lagrangian")
    if not kappa_cross(V, a, b).is_zero(pol):
        raise InvariantError("splitting pieces are not κ-orthogonal")
    if signature_by_congruence(kappa_gram(V, a), pol) != (n0, a.cols - n0, 0):
        raise InvariantError("κ is not positive semidefinite on the first piece")
    if signature_by_congruence(kappa_gram(V, b), pol) != (n0, 0, b.cols - n0):
        raise InvariantError("κ is not negative semidefinite on the second piece")
    K = kernel_frame(F, pol)
    if K.cols != n0 or (n0 and not span_equal(F0, K, pol)):
        raise InvariantError("intersection of the pieces is not the κ-kernel")
    if a.is_exact:
        a, b = canonical_span(a), canonical_span(b)
    else:
        a = Matrix.from_numpy(orthonormal_basis(a, pol).astype(complex))
        b = Matrix.from_numpy(orthonormal_basis(b, pol).astype(complex))
    return SplitLagrangian(V, a, b)


def split_type(S: SplitLagrangian, pol: TolerancePolicy | None = None) -> OrbitType:
    n0 = intersect_columns(S.geq0, S.leq0, pol).cols
    return OrbitType(n0, S.geq0.cols - n0, S.leq0.cols - n0)


def forget_splitting(S: SplitLagrangian, pol: TolerancePolicy | None = None) -> ComplexLagrangian:
    return S.lagrangian(pol)


def _cholesky_whiten(M: np.ndarray) -> np.ndarray:
    return np.linalg.inv(np.linalg.cholesky(M))


def kappa_sharp_eigen(F: ComplexLagrangian, J: CompatibleJ, pol: TolerancePolicy | None = None):
    """Eigenvalues and eigenvectors (as columns in V^ℂ) of κ measured against
    the hermitian inner product induced by g = ω(·, J·). Float output.
    """
    pol = pol or default_policy()
    U = orthonormal_basis(F.frame, pol).astype(complex)
    om = F.space.form("float").to_numpy()
    G = om.T @ J.J.to_numpy()
    G = 0.5 * (G + G.T)
    M = U.conj().T @ G @ U
    M = 0.5 * (M + M.conj().T)
    H = -1j * (U.conj().T @ om @ U)
    H = 0.5 * (H + H.conj().T)
    Li = _cholesky_whiten(M)
    A = Li @ H @ Li.conj().T
    w, Y = np.linalg.eigh(0.5 * (A + A.conj().T))
    X = Li.conj().T @ Y
    return w, U @ X


def j_split(F: ComplexLagrangian, J: CompatibleJ, pol: TolerancePolicy | None = None) -> SplitLagrangian:
    """Splitting of F by the sign of the eigenvalues of κ against g^ℂ."""
    pol = pol or default_policy()
    w, X = kappa_sharp_eigen(F, J, pol)
    t = lag_type(F, pol)
    order = np.argsort(w)
    neg = X[:, order[: t.nminus]]
    zero = X[:, order[t.nminus : t.nminus + t.n0]]
    pos = X[:, order[t.nminus + t.n0 :]]
    geq = Matrix.from_numpy(np.hstack([zero, pos]).astype(complex))
    leq = Matrix.from_numpy(np.hstack([zero, neg]).astype(complex))
    return make_split(F.space, geq, leq, pol)


def f_pm_j(J: CompatibleJ) -> tuple[ComplexLagrangian, ComplexLagrangian, Matrix, Matrix]:
    """(F_J, F_-J, pr_+J, pr_-J): the ±i-eigenspaces of J and the maps (1 ∓ iJ)/√2."""
    V = J.space
    Jc = as_complex(J.J)
    one = Matrix.eye(V.dim, Jc.backend)
    i = _imag_unit(Jc.backend)
    Fp = make_lagrangian(column_basis(one - Jc * i), V)
    Fm = make_lagrangian(column_basis(one + Jc * i), V)
    Jf = J.J.to_numpy()
    s = 1 / math.sqrt(2)
    prp = Matrix.from_numpy((np.eye(V.dim) - 1j * Jf) * s)
    prm = Matrix.from_numpy((np.eye(V.dim) + 1j * Jf) * s)
    return Fp, Fm, prp, prm


# ---------------------------------------------------------------- basepoints and adapted bases


def basepoint_frame(t: OrbitType) -> Matrix:
    """Exact frame with columns e0_j, e+_j - i f+_j, e-_j + i f-_j."""
    n = t.n
    F = Matrix.zeros(2 * n, n, "gaussian").a.copy()
    one = Gaussian(1)
    for j in range(n):
        F[j, j] = one
        if t.n0 <= j < t.n0 + t.nplus:
            F[n + j, j] = Gaussian(0, -1)
        elif j >= t.n0 + t.nplus:
            F[n + j, j] = Gaussian(0, 1)
    return Matrix._fast(F, "gaussian")


def basepoint(t: OrbitType) -> ComplexLagrangian:
    return make_lagrangian(basepoint_frame(t), SymplecticSpace.standard(t.n))


def split_basepoint(t: OrbitType) -> SplitLagrangian:
    """(span{e0, e+ - i f+}, span{e0, e- + i f-})."""
    F = basepoint_frame(t)
    geq = F.columns(range(t.n0 + t.nplus))
    leq = F.columns(list(range(t.n0)) + list(range(t.n0 + t.nplus, t.n)))
    return make_split(SymplecticSpace.standard(t.n), geq, leq)


def adapted_basis_lagrangianC(F: ComplexLagrangian, pol: TolerancePolicy | None = None) -> DarbouxBasis:
    """Darboux basis B with F = B·F_t for t = lag_type(F).

    κ-definite blocks come from the κ eigenvectors normalized to κ = ±2
    (e+ = Re v, f+ = -Im v and e- = Re v, f- = Im v); e0 is an orthonormal
    basis of Re F0 and f0 the isotropic complement inside (span e±, f±)^ω.
    Float output.
    """
    pol = pol or default_policy()
    V = F.space
    t = lag_type(F, pol)
    U = orthonormal_basis(F.frame, pol).astype(complex)
    om = V.form("float").to_numpy()
    H = -1j * (U.conj().T @ om @ U)
    w, X = np.linalg.eigh(0.5 * (H + H.conj().T))
    order = np.argsort(w)
    neg = order[: t.nminus]
    zero = order[t.nminus : t.nminus + t.n0]
    pos = order[t.nminus + t.n0 :]
    vp = (U @ X[:, pos]) * np.sqrt(2 / w[pos]) if pos.size else np.zeros((V.dim, 0), complex)
    vm = (U @ X[:, neg]) * np.sqrt(2 / -w[neg]) if neg.size else np.zeros((V.dim, 0), complex)
    ker = U @ X[:, zero]
    ep, fp = vp.real, -vp.imag
    em, fm = vm.real, vm.imag
    Vf = SymplecticSpace(V.n, V.form("float"))
    if t.n0:
        e0 = orthonormal_basis(Matrix.from_numpy(np.hstack([ker.real, ker.imag])), pol)
        if e0.shape[1] != t.n0:
            raise InvariantError("κ-kernel has an unexpected real dimension")
        pm = Matrix.from_numpy(np.hstack([ep, fp, em, fm]))
        Ub = symplectic_complement(Subspace(Vf, pm), pol).basis if pm.cols else Matrix.eye(V.dim, "float")
        e0m = Matrix.from_numpy(e0)
        c = extend_basis(e0m, Ub, pol)
        f0 = _lagrangian_complement(Vf, e0m, c, pol).to_numpy()
    else:
        e0 = np.zeros((V.dim, 0))
        f0 = np.zeros((V.dim, 0))
    B = Matrix.from_numpy(np.hstack([e0, ep, em, f0, fp, fm]))
    _assert_darboux(Vf, B, pol)
    return DarbouxBasis(B, t)


# ---------------------------------------------------------------- twistor correspondence


@dataclass(frozen=True, eq=False)
class TwistorPoint:
    """A symplectic W with compatible complex structures on W and W^ω.

    JW and JWomega are written in the coordinates of ``W.basis`` and
    ``Womega.basis``.
    """

    W: Subspace
    JW: Matrix
    Womega: Subspace
    JWomega: Matrix


def _restricted_space(S: Subspace) -> SymplecticSpace:
    return SymplecticSpace(S.dim // 2, S.space.gram(S.basis))


def make_twistor_point(W: Subspace, JW: Matrix, Womega: Subspace, JWomega: Matrix, pol: TolerancePolicy | None = None) -> TwistorPoint:
    pol = pol or default_policy()
    if not (symplectic_complement(W, pol) == Womega):
        raise InvariantError("second subspace is not the symplectic complement")
    if W.dim:
        check_compatible_J(JW, _restricted_space(W), pol)
    if Womega.dim:
        check_compatible_J(JWomega, _restricted_space(Womega), pol)
    return TwistorPoint(W, JW, Womega, JWomega)


def twistor_forward(S: SplitLagrangian, pol: TolerancePolicy | None = None) -> TwistorPoint:
    """W = Re F+ with J_W v = Re(i·v̂), W^ω = Re F- with J v = Re(-i·v̂),
    where v̂ is the unique preimage of v under Re.
    """
    pol = pol or default_policy()
    t = split_type(S, pol)
    if t.n0:
        raise InvariantError("twistor correspondence needs n0 = 0")
    V = S.space
    U, Um = S.geq0, S.leq0
    Bw = hstack(U.real(), -U.imag())
    Bwo = hstack(Um.real(), Um.imag())
    backend = Bw.backend
    JW = standard_J(t.nplus, backend) if t.nplus else Matrix.zeros(0, 0, backend)
    JWo = standard_J(t.nminus, backend) if t.nminus else Matrix.zeros(0, 0, backend)
    W = Subspace(V, Bw)
    Wo = Subspace(V, Bwo)
    return make_twistor_point(W, JW, Wo, JWo, pol)


def twistor_backward(tp: TwistorPoint, pol: TolerancePolicy | None = None) -> SplitLagrangian:
    """F+ = (1 - i J_W) W^ℂ and F- = (1 + i J_{W^ω}) (W^ω)^ℂ."""
    pol = pol or default_policy()
    V = tp.W.space

    def piece(S: Subspace, Jr: Matrix, sign: int) -> Matrix:
        if S.dim == 0:
            return Matrix.zeros(V.dim, 0, complex_backend(S.backend))
        Bc, Jc = same_backend(as_complex(S.basis), as_complex(Jr))
        i = _imag_unit(Bc.backend)
        one = Matrix.eye(S.dim, Bc.backend)
        return column_basis(Bc @ (one - Jc * (i * sign)), pol)

    return make_split(V, piece(tp.W, tp.JW, 1), piece(tp.Womega, tp.JWomega, -1), pol)
