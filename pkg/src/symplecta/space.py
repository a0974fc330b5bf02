"""The ambient symplectic space, its subspaces, orbit types and reduction.

Convention: the standard form is ``Ω = [[0, -1], [1, 0]]`` (n×n blocks) with
``ω(v, w) = wᵗ Ω v``, so ``ω(e_j, f_j) = 1`` for the basis order
``e_1..e_n, f_1..f_n``. A basis B is Darboux exactly when ``Bᵗ Ω B = Ω``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvariantError
from .numeric import (
    EXACT,
    Matrix,
    TolerancePolicy,
    column_basis,
    contains_columns,
    default_policy,
    extend_basis,
    hstack,
    intersect_columns,
    inverse,
    nullspace,
    rank,
    same_backend,
    signature_by_congruence,
    solve,
    span_equal,
    standard_omega_np,
)


class OrbitType(NamedTuple):
    """Orbit label (n0, nplus, nminus) of a subspace or complex Lagrangian."""

    n0: int
    nplus: int
    nminus: int

    @classmethod
    def of(cls, n0: int, nplus: int, nminus: int) -> OrbitType:
        if min(n0, nplus, nminus) < 0:
            raise InvariantError(f"orbit type entries must be nonnegative: {(n0, nplus, nminus)}")
        return cls(int(n0), int(nplus), int(nminus))

    @property
    def n(self) -> int:
        return self.n0 + self.nplus + self.nminus

    @property
    def isotropic(self) -> bool:
        return self.nplus == 0

    @property
    def coisotropic(self) -> bool:
        return self.nminus == 0

    @property
    def lagrangian(self) -> bool:
        return self.n0 == self.n

    @property
    def symplectic(self) -> bool:
        return self.n0 == 0

    def swapped(self) -> OrbitType:
        return OrbitType(self.n0, self.nminus, self.nplus)


def all_types(n: int) -> list[OrbitType]:
    return [OrbitType(a, b, n - a - b) for a in range(n + 1) for b in range(n + 1 - a)]


def standard_omega(n: int, backend: str = "rational") -> Matrix:
    if backend in EXACT:
        return Matrix(standard_omega_np(n).astype(int).tolist(), backend)
    return Matrix(standard_omega_np(n), backend)


def standard_J(n: int, backend: str = "rational") -> Matrix:
    """The standard compatible complex structure; it coincides with Ω."""
    return standard_omega(n, backend)


@dataclass(frozen=True, eq=False)
class SymplecticSpace:
    n: int
    omega: Matrix

    def __post_init__(self):
        if self.n < 1:
            raise InvariantError("symplectic space needs n >= 1")
        if self.omega.shape != (2 * self.n, 2 * self.n):
            raise InvariantError("form matrix has the wrong shape")
        if self.omega.is_complex:
            raise InvariantError("form matrix must be real")
        if not (self.omega.T + self.omega).is_zero():
            raise InvariantError("form matrix must be antisymmetric")
        if rank(self.omega) != 2 * self.n:
            raise InvariantError("form matrix must be invertible")

    @classmethod
    def standard(cls, n: int, backend: str = "rational") -> SymplecticSpace:
        return cls(n, standard_omega(n, backend))

    def __eq__(self, other):
        if not isinstance(other, SymplecticSpace):
            return NotImplemented
        if self.n != other.n:
            return False
        a, b = same_backend(self.omega, other.omega)
        return (a - b).is_zero()

    def __hash__(self):
        return hash(self.n)

    @property
    def dim(self) -> int:
        return 2 * self.n

    def form(self, backend: str) -> Matrix:
        """The form matrix widened to ``backend``."""
        if backend == self.omega.backend:
            return self.omega
        if self.omega.is_exact or backend in ("float", "complex"):
            return self.omega.to(backend)
        raise InvariantError(f"form is {self.omega.backend}; cannot use it on the {backend} backend")

    def pair(self, v: Matrix, w: Matrix):
        """ω(v, w) = wᵗ Ω v for single columns v, w."""
        v, w = same_backend(v, w)
        return (w.T @ self.form(v.backend) @ v)[0, 0]

    def gram(self, B: Matrix) -> Matrix:
        """Matrix of ω in the columns of B, in the same convention: Bᵗ Ω B."""
        return B.T @ self.form(B.backend) @ B

    def pairing(self, A: Matrix, B: Matrix) -> Matrix:
        """Matrix with entries ω(a_i, b_j)."""
        A, B = same_backend(A, B)
        return A.T @ self.form(A.backend).T @ B

    def is_symplectic(self, g: Matrix, pol: TolerancePolicy | None = None) -> bool:
        om = self.form(g.backend)
        return (g.T @ om @ g - om).is_zero(pol)

    def check_symplectic(self, g: Matrix, pol: TolerancePolicy | None = None) -> Matrix:
        if g.shape != (self.dim, self.dim) or not self.is_symplectic(g, pol):
            raise InvariantError("matrix is not symplectic")
        return g


@dataclass(frozen=True, eq=False)
class Subspace:
    """Column span of an independent-column matrix in a symplectic space."""

    space: SymplecticSpace
    basis: Matrix

    def __post_init__(self):
        if self.basis.is_complex:
            raise InvariantError("real subspaces need a real basis")
        if self.basis.rows != self.space.dim:
            raise InvariantError(f"basis has {self.basis.rows} rows, expected {self.space.dim}")
        if rank(self.basis) != self.basis.cols:
            raise InvariantError("basis columns are dependent")

    @classmethod
    def span(cls, space: SymplecticSpace, M: Matrix) -> Subspace:
        """Subspace spanned by the columns of M (dependent columns dropped)."""
        return cls(space, column_basis(M))

    @classmethod
    def zero(cls, space: SymplecticSpace, backend: str = "rational") -> Subspace:
        return cls(space, Matrix.zeros(space.dim, 0, backend))

    @property
    def dim(self) -> int:
        return self.basis.cols

    @property
    def backend(self) -> str:
        return self.basis.backend

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.space.n == other.space.n and span_equal(self.basis, other.basis)

    __hash__ = None

    def contains(self, v: Matrix) -> bool:
        return contains_columns(self.basis, v)

    def contains_subspace(self, other: Subspace) -> bool:
        return contains_columns(self.basis, other.basis)

    def to(self, backend: str) -> Subspace:
        return Subspace(self.space, self.basis.to(backend))

    def image(self, g: Matrix) -> Subspace:
        b, g = same_backend(self.basis, g)
        return Subspace.span(self.space, g @ b)

    def __repr__(self):
        return f"Subspace(n={self.space.n}, dim={self.dim}, backend={self.backend})"


def _same_space(*ws: Subspace):
    n = ws[0].space.n
    if any(w.space.n != n for w in ws):
        raise InvariantError("subspaces live in different spaces")


def symplectic_complement(W: Subspace, pol: TolerancePolicy | None = None) -> Subspace:
    """W^ω: the nullspace of (Ω W)ᵗ."""
    om = W.space.form(W.backend)
    return Subspace(W.space, nullspace((om @ W.basis).T, pol))


def radical(W: Subspace, pol: TolerancePolicy | None = None) -> Subspace:
    """W ∩ W^ω."""
    return Subspace(W.space, intersect_columns(W.basis, symplectic_complement(W, pol).basis, pol))


def sum_subspaces(*ws: Subspace) -> Subspace:
    _same_space(*ws)
    return Subspace.span(ws[0].space, hstack(*same_backend(*[w.basis for w in ws])))


def intersect(A: Subspace, B: Subspace, pol: TolerancePolicy | None = None) -> Subspace:
    _same_space(A, B)
    return Subspace(A.space, intersect_columns(A.basis, B.basis, pol))


def subspace_type(W: Subspace, pol: TolerancePolicy | None = None) -> OrbitType:
    """Orbit type: n0 = dim(W ∩ W^ω), nplus = (dim W - n0)/2, nminus = n - n0 - nplus."""
    n0 = radical(W, pol).dim
    k = W.dim
    if (k - n0) % 2:
        raise InvariantError("radical has the wrong parity; rank threshold too loose")
    nplus = (k - n0) // 2
    return OrbitType.of(n0, nplus, W.space.n - n0 - nplus)


def is_isotropic(W: Subspace, pol: TolerancePolicy | None = None) -> bool:
    return W.space.gram(W.basis).is_zero(pol)


# ---------------------------------------------------------------- complex structures


@dataclass(frozen=True, eq=False)
class CompatibleJ:
    """A complex structure J with J² = -1, Jᵗ Ω J = Ω and ω(v, Jv) > 0."""

    J: Matrix
    space: SymplecticSpace

    @property
    def backend(self) -> str:
        return self.J.backend

    def metric(self, backend: str | None = None) -> Matrix:
        """Gram matrix G with g(u, v) = ω(u, Jv) = uᵗ G v."""
        J = self.J if backend is None else self.J.to(backend)
        om = self.space.form(J.backend)
        # g(u, v) = ω(u, Jv) = (Jv)ᵗ Ω u = uᵗ Ωᵗ J v
        return om.T @ J

    def inner(self, A: Matrix, B: Matrix) -> Matrix:
        """Matrix of g(a_i, b_j)."""
        A, B, G = same_backend(A, B, self.metric())
        return A.T @ G @ B

    def apply(self, M: Matrix) -> Matrix:
        J, M = same_backend(self.J, M)
        return J @ M


def check_compatible_J(J: Matrix, V: SymplecticSpace, pol: TolerancePolicy | None = None) -> CompatibleJ:
    """Validate J against the three compatibility invariants."""
    pol = pol or default_policy()
    if J.shape != (V.dim, V.dim):
        raise InvariantError("complex structure has the wrong shape")
    if J.is_complex:
        raise InvariantError("complex structure must be real")
    one = Matrix.eye(V.dim, J.backend)
    if not (J @ J + one).is_zero(pol):
        raise InvariantError("J² = -1 fails")
    om = V.form(J.backend)
    if not (J.T @ om @ J - om).is_zero(pol):
        raise InvariantError("J is not symplectic")
    G = om.T @ J
    if not (G - G.T).is_zero(pol):
        raise InvariantError("ω(·, J·) is not symmetric")
    if J.is_exact:
        sig = signature_by_congruence(G, pol)
    else:
        sig = signature_by_congruence(Matrix.from_numpy(0.5 * (G.a + G.a.T)), pol)
    if sig != (0, V.dim, 0):
        raise InvariantError(f"ω(·, J·) is not positive definite (inertia {sig})")
    return CompatibleJ(J, V)


def standard_compatible_J(V: SymplecticSpace, backend: str = "rational") -> CompatibleJ:
    return check_compatible_J(standard_J(V.n, backend), V)


def unitary_orthonormalize(J: CompatibleJ, S: Matrix, m: int, pol: TolerancePolicy | None = None) -> np.ndarray:
    """First m vectors e of a J-unitary basis {e, Je} of the J-invariant span of S.

    Runs Gram-Schmidt for g = ω(·, J·) over columns of S in input order,
    removing both e and Je components at each step. Float output.
    """
    pol = pol or default_policy()
    G = J.metric().to_numpy() if J.J.is_exact else J.metric().a
    Jn = J.J.to_numpy()
    Sn = S.to_numpy()
    G = 0.5 * (G + G.T)
    es: list[np.ndarray] = []
    scale = max(1.0, float(np.max(np.abs(Sn), initial=0.0)))
    for j in range(Sn.shape[1]):
        if len(es) == m:
            break
        v = Sn[:, j].copy()
        for _ in range(2):
            for e in es:
                for u in (e, Jn @ e):
                    v -= (u @ G @ v) * u
        nv = float(v @ G @ v)
        if nv > 0 and np.sqrt(nv) > pol.rank_tol * scale:
            es.append(v / np.sqrt(nv))
    if len(es) != m:
        raise InvariantError(f"span is not J-invariant of real dimension {2 * m}")
    return np.array(es).T.reshape(Sn.shape[0], m)


def g_orthonormalize(J: CompatibleJ, S: Matrix, pol: TolerancePolicy | None = None) -> np.ndarray:
    """Orthonormal basis for g = ω(·, J·) of the span of S (input order). Float output."""
    pol = pol or default_policy()
    G = J.metric().to_numpy()
    G = 0.5 * (G + G.T)
    Sn = S.to_numpy()
    scale = max(1.0, float(np.max(np.abs(Sn), initial=0.0)))
    es: list[np.ndarray] = []
    for j in range(Sn.shape[1]):
        v = Sn[:, j].copy()
        for _ in range(2):
            for e in es:
                v -= (e @ G @ v) * e
        nv = float(v @ G @ v)
        if nv > 0 and np.sqrt(nv) > pol.rank_tol * scale:
            es.append(v / np.sqrt(nv))
    return np.array(es).T.reshape(Sn.shape[0], len(es))


# ---------------------------------------------------------------- reduction


@dataclass(frozen=True, eq=False)
class ReducedSpace:
    """Model of W0^ω / W0 as a concrete symplectic complement C of W0 inside W0^ω.

    Coordinates on the reduced space are coefficients with respect to the
    columns of ``complement_basis``.
    """

    parent: SymplecticSpace
    W0: Subspace
    complement_basis: Matrix
    omega_tilde: Matrix
    J_tilde: Matrix | None = None

    @property
    def m(self) -> int:
        return self.complement_basis.cols // 2

    @property
    def space(self) -> SymplecticSpace:
        return SymplecticSpace(self.m, self.omega_tilde) if self.m else None

    @property
    def compatible_J(self) -> CompatibleJ | None:
        if self.J_tilde is None or not self.m:
            return None
        return CompatibleJ(self.J_tilde, self.space)

    def _basis_frame(self, backend: str) -> Matrix:
        W0b, C = same_backend(self.W0.basis, self.complement_basis)
        F = hstack(W0b, C)
        if backend != F.backend:
            F = F.to(backend)
        return F

    def project(self, v: Matrix, pol: TolerancePolicy | None = None) -> Matrix:
        """Reduced coordinates of vectors v in W0^ω (columns), the W0 part dropped."""
        C = self.complement_basis
        target = _widen(v.backend, C.backend)
        F = self._basis_frame(target)
        x = solve(F, v.to(target) if v.backend != target else v, pol)
        return x[self.W0.dim :, :]

    def lift(self, a: Matrix) -> Matrix:
        """Vectors C a in the complement."""
        C = self.complement_basis
        target = _widen(a.backend, C.backend)
        C2 = C.to(target) if C.backend != target else C
        a2 = a.to(target) if a.backend != target else a
        return C2 @ a2

    def reduced_subspace(self, W: Subspace, pol: TolerancePolicy | None = None) -> Subspace:
        """Image in the reduced space of a subspace with W0 ⊆ W ⊆ W0^ω."""
        if not W.contains_subspace(self.W0):
            raise InvariantError("subspace does not contain the reduction radical")
        X = self.project(W.basis, pol)
        return Subspace.span(self.space, X)

    def lift_subspace(self, Wt: Subspace) -> Subspace:
        """W0 ⊕ C·Wt as a subspace of the parent."""
        lifted = self.lift(Wt.basis)
        W0b = self.W0.basis
        W0b, lifted = same_backend(W0b, lifted)
        return Subspace.span(self.parent, hstack(W0b, lifted))


def _widen(a: str, b: str) -> str:
    cplx = a in ("gaussian", "complex") or b in ("gaussian", "complex")
    exact = a in EXACT and b in EXACT
    if exact:
        return "gaussian" if cplx else "rational"
    return "complex" if cplx else "float"


def reduce_at(W0: Subspace, J: CompatibleJ | None = None, pol: TolerancePolicy | None = None) -> ReducedSpace:
    """Reduction at an isotropic subspace.

    Without J the complement is chosen by elimination (exact on rational
    input). With J it is the g-orthogonal complement of W0 ⊕ J W0 inside
    W0^ω, given by a J-unitary Darboux basis, so the reduced form and complex
    structure are the standard ones (float).
    """
    pol = pol or default_policy()
    V = W0.space
    if not is_isotropic(W0, pol):
        raise InvariantError("reduction needs an isotropic subspace")
    n0 = W0.dim
    m = V.n - n0
    W0w = symplectic_complement(W0, pol)
    if J is None:
        C = extend_basis(W0.basis, W0w.basis, pol)
        om_t = V.gram(C)
        return ReducedSpace(V, W0, C, om_t, None)
    om = V.form(W0.backend) if W0.basis.is_exact and J.J.is_exact else V.form("float")
    Jm = J.J if om.backend == J.J.backend else J.J.to(om.backend)
    b0 = W0.basis if W0.backend == om.backend else W0.basis.to(om.backend)
    # v ∈ W0^ω and g(v, J^k w0) = 0  <=>  [W0 | J W0]ᵗ Ω v = 0
    cond = hstack(b0, Jm @ b0).T @ om
    S = nullspace(cond, pol) if n0 else Matrix.eye(V.dim, om.backend)
    if S.cols != 2 * m:
        raise InvariantError("J-orthogonal complement has the wrong dimension")
    e = unitary_orthonormalize(J, S, m, pol)
    Jn = J.J.to_numpy()
    C = Matrix.from_numpy(np.hstack([e, Jn @ e])) if m else Matrix.zeros(V.dim, 0, "float")
    om_t = standard_omega(m, "float") if m else Matrix.zeros(0, 0, "float")
    J_t = standard_J(m, "float") if m else Matrix.zeros(0, 0, "float")
    if m:
        res = (V.gram(C) - om_t).norm()
        if res > 1e3 * pol.residual_tol * max(1.0, C.scale() ** 2):
            raise InvariantError(f"reduced complement is not Darboux (residual {res:.3e})")
    return ReducedSpace(V, W0, C, om_t, J_t)


def transform_J(J: CompatibleJ, g: Matrix) -> CompatibleJ:
    """g J g⁻¹ for symplectic g."""
    Jm, g2 = same_backend(J.J, g)
    return check_compatible_J(g2 @ Jm @ inverse(g2), J.space)
