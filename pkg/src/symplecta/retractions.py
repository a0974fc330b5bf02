"""Reduction maps, J-orbit membership, compatible involutions, the K·exp·exp
factorization and the retractions γ_J, β_J, η_J with the χ correction.

Retractions work in the reduced space W0^ω/W0 modelled by the J-unitary
complement of W0 ⊕ JW0, where ω̃ and J̃ are standard. All outputs are float.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InvariantError
from .darboux import in_gr_J, j_invariant_complement, unitary_orthonormalize
from .lagrangian import (
    ComplexLagrangian,
    SplitLagrangian,
    adapted_basis_lagrangianC,
    as_complex,
    basepoint_frame,
    f_pm_j,
    kappa_gram,
    kernel_frame,
    lag_type,
    make_lagrangian,
    make_split,
    real_span,
    split_type,
)
from .numeric import (
    Matrix,
    TolerancePolicy,
    column_basis,
    default_policy,
    geometric_mean,
    hstack,
    intersect_columns,
    polar_decompose,
    standard_omega_np,
    sym_apply,
)
from .space import (
    CompatibleJ,
    OrbitType,
    ReducedSpace,
    Subspace,
    SymplecticSpace,
    radical,
    reduce_at,
    standard_compatible_J,
    subspace_type,
    symplectic_complement,
)

ORDERS = ("par_perp", "perp_par")


def _float(M: Matrix) -> Matrix:
    if M.backend in ("float", "complex"):
        return M
    return M.to("complex" if M.is_complex else "float")


def _float_space(V: SymplecticSpace) -> SymplecticSpace:
    return SymplecticSpace(V.n, V.form("float"))


def _float_J(J: CompatibleJ) -> CompatibleJ:
    return CompatibleJ(_float(J.J), _float_space(J.space))


def _default_J(V: SymplecticSpace, J: CompatibleJ | None) -> CompatibleJ:
    if J is None:
        J = standard_compatible_J(V, "rational" if V.omega.is_exact else "float")
    return _float_J(J)


# ---------------------------------------------------------------- reduction maps


def radical_maps(x, pol: TolerancePolicy | None = None) -> Subspace:
    """W ↦ W ∩ W^ω, F ↦ Re F0 and F⊕ ↦ Re(F≥0 ∩ F≤0)."""
    pol = pol or default_policy()
    if isinstance(x, Subspace):
        return radical(x, pol)
    if isinstance(x, ComplexLagrangian):
        return real_span(x.space, kernel_frame(x, pol), pol)
    if isinstance(x, SplitLagrangian):
        return real_span(x.space, intersect_columns(x.geq0, x.leq0, pol), pol)
    raise InvariantError(f"unsupported input {type(x).__name__}")


def real_nonnegative_part(S: SplitLagrangian, pol: TolerancePolicy | None = None) -> Subspace:
    """Re F≥0: the real subspace W with W^ℂ = F≥0 + conj(F≥0)."""
    return real_span(S.space, S.geq0, pol)


def forget(S: SplitLagrangian, pol: TolerancePolicy | None = None) -> ComplexLagrangian:
    """F⊕ ↦ F≥0 + F≤0."""
    return S.lagrangian(pol)


# ---------------------------------------------------------------- membership and sections


def _intersection_dim(A: Matrix, B: Matrix, pol: TolerancePolicy) -> int:
    A, B = _float(as_complex(A)), _float(as_complex(B))
    return intersect_columns(A, B, pol).cols


def membership_J(x, J: CompatibleJ | None = None, pol: TolerancePolicy | None = None) -> bool:
    """Membership in Gr_J, Lag_J or Lag_{J,⊕} according to the kind of x."""
    pol = pol or default_policy()
    if isinstance(x, Subspace):
        return in_gr_J(x, _default_J(x.space, J), pol)
    Jf = _default_J(x.space, J)
    FJ, FmJ, _, _ = f_pm_j(Jf)
    if isinstance(x, ComplexLagrangian):
        t = lag_type(x, pol)
        return (
            _intersection_dim(x.frame, FJ.frame, pol) == t.nplus
            and _intersection_dim(x.frame, FmJ.frame, pol) == t.nminus
        )
    if isinstance(x, SplitLagrangian):
        t = split_type(x, pol)
        return (
            _intersection_dim(x.geq0, FJ.frame, pol) == t.nplus
            and _intersection_dim(x.leq0, FmJ.frame, pol) == t.nminus
        )
    raise InvariantError(f"unsupported input {type(x).__name__}")


def psi_J(W: Subspace, J: CompatibleJ | None = None, pol: TolerancePolicy | None = None) -> SplitLagrangian:
    """(W0^ℂ ⊕ (1 - iJ)W+^J, W0^ℂ ⊕ (1 + iJ)W-^J) for W in Gr_J."""
    pol = pol or default_policy()
    V = _float_space(W.space)
    Jf = _default_J(W.space, J)
    Wf = Subspace(V, _float(W.basis))
    Wp = j_invariant_complement(Wf, Jf, pol).basis
    Wm = j_invariant_complement(symplectic_complement(Wf, pol), Jf, pol).basis
    W0 = radical(Wf, pol).basis.to("complex")
    Jc = Jf.J.to("complex")
    one = Matrix.eye(V.dim, "complex")
    geq = hstack(W0, column_basis((one - Jc * 1j) @ Wp.to("complex"), pol)) if Wp.cols else W0
    leq = hstack(W0, column_basis((one + Jc * 1j) @ Wm.to("complex"), pol)) if Wm.cols else W0
    return make_split(V, geq, leq, pol)


def iota_J(F: ComplexLagrangian, J: CompatibleJ | None = None, pol: TolerancePolicy | None = None) -> SplitLagrangian:
    """(F0 ⊕ (F ∩ F_J), F0 ⊕ (F ∩ F_-J)) for F in Lag_J."""
    pol = pol or default_policy()
    Jf = _default_J(F.space, J)
    V = _float_space(F.space)
    FJ, FmJ, _, _ = f_pm_j(Jf)
    Ff = _float(F.frame)
    F0 = _float(kernel_frame(F, pol))
    plus = intersect_columns(Ff, FJ.frame, pol)
    minus = intersect_columns(Ff, FmJ.frame, pol)
    t = lag_type(F, pol)
    if plus.cols != t.nplus or minus.cols != t.nminus:
        raise InvariantError("F is not in Lag_J")
    return make_split(V, hstack(F0, plus), hstack(F0, minus), pol)


# ---------------------------------------------------------------- compatible involutions


@dataclass(frozen=True, eq=False)
class CompatibleTriple:
    I: Matrix
    Jt: Matrix
    basepoint: object


def _real_frame(A: Matrix) -> np.ndarray:
    a = A.to_numpy()
    return np.hstack([a.real, a.imag]) if np.iscomplexobj(a) else a


def _involution(plus: np.ndarray, minus: np.ndarray, pol: TolerancePolicy) -> np.ndarray:
    P = np.hstack([plus, minus])
    if P.shape[0] != P.shape[1] or np.linalg.matrix_rank(P, tol=pol.rank_tol) != P.shape[0]:
        raise InvariantError("eigenspaces of the involution do not span")
    D = np.diag([1.0] * plus.shape[1] + [-1.0] * minus.shape[1])
    return P @ D @ np.linalg.inv(P)


def compatible_involution(b, Jt: CompatibleJ | None = None, pol: TolerancePolicy | None = None) -> CompatibleTriple:
    """The involution commuting with J̃ whose +1/-1 eigenspaces are the two
    J̃-invariant pieces determined by the basepoint b (which must have n0 = 0).
    """
    pol = pol or default_policy()
    V = b.space
    Jf = _default_J(V, Jt)
    if not membership_J(b, Jf, pol):
        raise InvariantError("basepoint is not a member of the J-orbit")
    orth = lambda M: np.linalg.qr(M)[0][:, : np.linalg.matrix_rank(M, tol=pol.rank_tol)] if M.size else M
    if isinstance(b, Subspace):
        if subspace_type(b, pol).n0:
            raise InvariantError("compatible involutions need a symplectic basepoint")
        Wf = Subspace(_float_space(V), _float(b.basis))
        plus = Wf.basis.to_numpy()
        minus = symplectic_complement(Wf, pol).basis.to_numpy()
    else:
        FJ, FmJ, _, _ = f_pm_j(Jf)
        if isinstance(b, ComplexLagrangian):
            if lag_type(b, pol).n0:
                raise InvariantError("compatible involutions need a basepoint with n0 = 0")
            a, c = _float(b.frame), _float(b.frame)
        else:
            if split_type(b, pol).n0:
                raise InvariantError("compatible involutions need a basepoint with n0 = 0")
            a, c = _float(b.geq0), _float(b.leq0)
        plus = orth(_real_frame(intersect_columns(a, FJ.frame, pol)))
        minus = orth(_real_frame(intersect_columns(c, FmJ.frame, pol)))
    I = _involution(plus.reshape(V.dim, -1), minus.reshape(V.dim, -1), pol)
    J = Jf.J.to_numpy()
    om = V.form("float").to_numpy()
    scale = 1e3 * pol.residual_tol * max(1.0, float(np.linalg.norm(I)) ** 2)
    if (
        np.linalg.norm(I @ I - np.eye(V.dim)) > scale
        or np.linalg.norm(I @ J - J @ I) > scale
        or np.linalg.norm(I.T @ om @ I - om) > scale
    ):
        raise InvariantError("involution fails I² = 1, IJ = JI or symplecticity")
    return CompatibleTriple(Matrix.from_numpy(I), Jf.J, b)


def standard_involution(p: int, q: int) -> np.ndarray:
    """diag(1_p, -1_q, 1_p, -1_q)."""
    d = np.array([1.0] * p + [-1.0] * q)
    return np.diag(np.concatenate([d, d]))


# ---------------------------------------------------------------- K·exp·exp factorization


@dataclass(frozen=True)
class MostowFactors:
    k: Matrix
    p_par: Matrix
    p_perp: Matrix
    residual: float
    order: str

    def product(self) -> np.ndarray:
        k = self.k.to_numpy()
        ex = sym_apply(self.p_par.to_numpy(), np.exp)
        ey = sym_apply(self.p_perp.to_numpy(), np.exp)
        return k @ ex @ ey if self.order == "par_perp" else k @ ey @ ex


def eigen_projections(X: np.ndarray, I: np.ndarray, J: np.ndarray) -> dict[str, np.ndarray]:
    """Components of X in k∥, k×, p∥, p× for the commuting involutions Ad(I), Ad(J)."""
    Ii, Ji = np.linalg.inv(I), np.linalg.inv(J)
    aI = lambda Y: I @ Y @ Ii
    aJ = lambda Y: J @ Y @ Ji
    k = 0.5 * (X + aJ(X))
    p = 0.5 * (X - aJ(X))
    return {
        "k_par": 0.5 * (k + aI(k)),
        "k_perp": 0.5 * (k - aI(k)),
        "p_par": 0.5 * (p + aI(p)),
        "p_perp": 0.5 * (p - aI(p)),
    }


def _unitary_frame(J: CompatibleJ, pol: TolerancePolicy) -> np.ndarray:
    m = J.space.n
    e = unitary_orthonormalize(J, Matrix.eye(2 * m, "float"), m, pol)
    return np.hstack([e, J.J.to_numpy() @ e])


def _nearest_unitary(k: np.ndarray) -> np.ndarray:
    """Nearest element of Sp(2m) ∩ O(2m) for the standard J, via the polar
    factor of the complex matrix a + ib of the J-commuting part.
    """
    m = k.shape[0] // 2
    a = 0.5 * (k[:m, :m] + k[m:, m:])
    b = 0.5 * (k[m:, :m] - k[:m, m:])
    U, _, Vh = np.linalg.svd(a + 1j * b)
    u = U @ Vh
    return np.block([[u.real, -u.imag], [u.imag, u.real]])


def _closed_form(g: np.ndarray, I: np.ndarray, order: str) -> tuple[np.ndarray, np.ndarray]:
    """(x, y) from geometric means; exact in exact arithmetic but loses about
    cond(g)² in floating point, so it only seeds the refinement.
    """
    P = g.T @ g
    P = 0.5 * (P + P.T)
    Q = I @ P @ I
    if order == "par_perp":
        # g = k e^x e^y: Q⁻¹ # P = e^{2y}
        Qi = np.linalg.inv(Q)
        y = 0.5 * sym_apply(geometric_mean(0.5 * (Qi + Qi.T), P), np.log)
        emy = sym_apply(y, lambda w: np.exp(-w))
        x = 0.5 * sym_apply(emy @ P @ emy, np.log)
    else:
        # g = k e^y e^x: P # Q = e^{2x}
        x = 0.5 * sym_apply(geometric_mean(P, Q), np.log)
        emx = sym_apply(x, lambda w: np.exp(-w))
        y = 0.5 * sym_apply(emx @ P @ emx, np.log)
    return x, y


def _p_bases(I: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases of p∥ and p× (stacked k×2m×2m) for the standard J."""
    m = I.shape[0] // 2
    J = standard_omega_np(m)
    mats = []
    for i in range(m):
        for j in range(i, m):
            S = np.zeros((m, m))
            S[i, j] = S[j, i] = 1.0
            Z = np.zeros((m, m))
            mats.append(np.block([[S, Z], [Z, -S]]))
            mats.append(np.block([[Z, S], [S, Z]]))
    out = []
    for key in ("p_par", "p_perp"):
        vecs = np.array([eigen_projections(X, I, J)[key].ravel() for X in mats])
        _, sv, vt = np.linalg.svd(vecs, full_matrices=False)
        rank = int((sv > 1e-9 * max(1.0, sv[0])).sum()) if sv.size else 0
        out.append(vt[:rank].reshape(rank, 2 * m, 2 * m))
    return out[0], out[1]


def _project(X: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return np.tensordot(np.tensordot(basis, X, 2), basis, 1)


def _polar_log(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """M = k·exp(R) with k orthogonal and R symmetric, via the SVD."""
    U, sv, Vt = np.linalg.svd(M)
    return U @ Vt, (Vt.T * np.log(sv)) @ Vt


def _decompose_standard(
    g: np.ndarray, I: np.ndarray, order: str, tol: float, max_iter: int = 200
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Damped Gauss–Newton on the symmetric log R of g·e^{-a}·e^{-b} = k·e^R,
    where g = k·e^b·e^a (a = p×, b = p∥ for par_perp; swapped for perp_par).

    Updates are e^a ← e^{a/2} e^{δa} e^{a/2}, which stays in exp(p×) (resp.
    exp(p∥)) exactly and makes the linear model exact to first order.
    """
    if order not in ORDERS:
        raise InvariantError(f"unknown order {order!r}; expected one of {ORDERS}")
    Bpar, Bperp = _p_bases(I)
    try:
        x, y = _closed_form(g, I, order)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvariantError("closed form left the finite range")
    except (InvariantError, np.linalg.LinAlgError):
        _, z = _polar_log(g)
        x, y = z, z
    x, y = _project(x, Bpar), _project(y, Bperp)
    a, b, Ba, Bb = (y, x, Bperp, Bpar) if order == "par_perp" else (x, y, Bpar, Bperp)
    Ea, Eb = sym_apply(a, np.exp), sym_apply(b, np.exp)
    inv = lambda E: sym_apply(E, lambda w: 1 / w)
    half = lambda E: sym_apply(E, np.sqrt)

    def residual(Ea, Eb):
        k, R = _polar_log(g @ inv(Ea) @ inv(Eb))
        return k, R, float(np.linalg.norm(R))

    def grow(E, d):
        h = half(E)
        out = h @ sym_apply(d, np.exp) @ h
        return 0.5 * (out + out.T)

    k, R, r = residual(Ea, Eb)
    for _ in range(max_iter):
        if r <= tol:
            break
        # M' ≈ M (1 - Ad(C_a) δa - Ad(C_b) δb), C_a = e^b e^{a/2}, C_b = e^{b/2}
        ha, hb = half(Ea), half(Eb)
        Ca, Cai = Eb @ ha, inv(ha) @ inv(Eb)
        Cb, Cbi = hb, inv(hb)
        cols = []
        for Bk, C, Ci in ((Ba, Ca, Cai), (Bb, Cb, Cbi)):
            for i in range(len(Bk)):
                D = C @ Bk[i] @ Ci
                cols.append((0.5 * (D + D.T)).ravel())
        coef = np.linalg.lstsq(np.array(cols).T, R.ravel(), rcond=None)[0]
        da = np.tensordot(coef[: len(Ba)], Ba, 1)
        db = np.tensordot(coef[len(Ba) :], Bb, 1)
        step = 1.0
        while step > 1e-6:
            Ea2, Eb2 = grow(Ea, step * da), grow(Eb, step * db)
            cand = residual(Ea2, Eb2)
            if cand[2] < r:
                Ea, Eb = Ea2, Eb2
                k, R, r = cand
                break
            step /= 2
        else:
            break
    a, b = _project(sym_apply(Ea, np.log), Ba), _project(sym_apply(Eb, np.log), Bb)
    x, y = (b, a) if order == "par_perp" else (a, b)
    return _nearest_unitary(k), x, y, r


def mostow_decompose(
    g: Matrix, triple: CompatibleTriple, order: str = "par_perp", pol: TolerancePolicy | None = None
) -> MostowFactors:
    """g = k·exp(p∥)·exp(p×) (order par_perp) or k·exp(p×)·exp(p∥) (perp_par).

    Seeded by the geometric-mean closed form (P = gᵀg, Q = Ad(I)P:
    exp(2p×) = Q⁻¹ # P in the first order, exp(2p∥) = P # Q in the second),
    or by the polar split if that fails, then refined by damped Gauss–Newton
    for at most 200 steps. Adjoints are taken in a J-unitary frame. The
    residual is ‖k·exp·exp − g‖ / max(1, ‖g‖).
    """
    pol = pol or default_policy()
    gn = _float(g).to_numpy()
    Jn = _float(triple.Jt).to_numpy()
    In = _float(triple.I).to_numpy()
    d = gn.shape[0]
    V = SymplecticSpace(d // 2, Matrix.from_numpy(standard_omega_np(d // 2)))
    om = standard_omega_np(d // 2)
    if np.linalg.norm(gn.T @ om @ gn - om) > 1e3 * pol.residual_tol * max(1.0, np.linalg.norm(gn)) ** 2:
        raise InvariantError("g is not symplectic")
    if np.allclose(Jn, om, atol=pol.residual_tol):
        U = np.eye(d)
    else:
        U = _unitary_frame(CompatibleJ(Matrix.from_numpy(Jn), V), pol)
    Ui = np.linalg.inv(U)
    gs, Is = Ui @ gn @ U, Ui @ In @ U
    k, x, y, _ = _decompose_standard(gs, Is, order, 0.1 * pol.residual_tol)
    k, x, y = U @ k @ Ui, U @ x @ Ui, U @ y @ Ui
    ex = U @ sym_apply(Ui @ x @ U, np.exp) @ Ui
    ey = U @ sym_apply(Ui @ y @ U, np.exp) @ Ui
    recon = k @ ex @ ey if order == "par_perp" else k @ ey @ ex
    residual = float(np.linalg.norm(recon - gn)) / max(1.0, float(np.linalg.norm(gn)))
    residual = max(residual, float(np.linalg.norm(k @ Jn - Jn @ k)))
    if residual > pol.residual_tol:
        raise ConvergenceError(f"factorization missed tolerance {pol.residual_tol:.1e}", residual)
    return MostowFactors(Matrix.from_numpy(k), Matrix.from_numpy(x), Matrix.from_numpy(y), residual, order)


# ---------------------------------------------------------------- reduced pipeline


def _reduce(W0: Subspace, J: CompatibleJ, pol: TolerancePolicy) -> ReducedSpace:
    return reduce_at(Subspace(_float_space(W0.space), _float(W0.basis)) if W0.dim else Subspace.zero(_float_space(W0.space), "float"), J, pol)


def _reduced_basepoints(p: int, q: int) -> tuple[Matrix, Matrix, Matrix]:
    """(real basis of W̃*, frame of F̃≥0*, frame of F̃≤0*) in standard coordinates."""
    m = p + q
    eye = np.eye(2 * m)
    W = eye[:, list(range(p)) + [m + j for j in range(p)]]
    F = basepoint_frame(OrbitType(0, p, q)).to("complex").to_numpy()
    return Matrix.from_numpy(W), Matrix.from_numpy(F[:, :p].reshape(2 * m, p)), Matrix.from_numpy(F[:, p:].reshape(2 * m, q))


def _lift_complex(R: ReducedSpace, A: np.ndarray) -> np.ndarray:
    C = _float(R.complement_basis).to_numpy()
    return C @ A


def _assemble(V: SymplecticSpace, W0: Subspace, R: ReducedSpace, A: np.ndarray) -> Matrix:
    W0b = _float(W0.basis).to_numpy().astype(complex)
    return Matrix.from_numpy(np.hstack([W0b, _lift_complex(R, A)]))


def _split_adapted_basis(Fp: np.ndarray, Fm: np.ndarray, V: SymplecticSpace) -> np.ndarray:
    """Darboux basis B with B·F⊕* = (span Fp, span Fm) for a κ-orthogonal pair
    with κ > 0 on Fp and κ < 0 on Fm (n0 = 0).
    """
    def normalize(A: np.ndarray, sign: float) -> np.ndarray:
        if A.shape[1] == 0:
            return A
        H = sign * kappa_gram(V, Matrix.from_numpy(A)).to_numpy()
        H = 0.5 * (H + H.conj().T)
        L = np.linalg.cholesky(H / 2)
        return A @ np.linalg.inv(L).conj().T

    vp, vm = normalize(Fp, 1.0), normalize(Fm, -1.0)
    return np.hstack([vp.real, vm.real, -vp.imag, vm.imag])


def _balanced_darboux(S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Darboux pairs (E, F) for the standard form spanning the symplectic span of S.

    Built from the eigenvectors of i·G, G the form on an orthonormal frame, so
    the conditioning depends only on the span, not on the columns of S.
    """
    Q = np.linalg.qr(S)[0]
    om = standard_omega_np(S.shape[0] // 2)
    # ω(a, b) = bᵀ G a in frame coordinates
    G = Q.T @ om @ Q
    H = 1j * G
    w, U = np.linalg.eigh(0.5 * (H + H.conj().T))
    k = S.shape[1] // 2
    E, F = [], []
    for u in U[:, np.argsort(w)[-k:]].T:
        a, b = u.real, u.imag
        c = b @ G @ a
        if c < 0:
            b = -b
        s = np.sqrt(abs(c))
        E.append(Q @ (a / s))
        F.append(Q @ (b / s))
    return np.column_stack(E), np.column_stack(F)


def _triple_standard(p: int, q: int) -> CompatibleTriple:
    m = p + q
    return CompatibleTriple(Matrix.from_numpy(standard_involution(p, q)), Matrix.from_numpy(standard_omega_np(m)), None)


def gamma_J(W: Subspace, J: CompatibleJ | None = None, pol: TolerancePolicy | None = None) -> Subspace:
    """Retraction of Gr(n⃗) onto Gr_J(n⃗)."""
    return _gamma(W, J, pol)[0]


def _gamma(W: Subspace, J: CompatibleJ | None, pol: TolerancePolicy | None) -> tuple[Subspace, float]:
    pol = pol or default_policy()
    V = _float_space(W.space)
    Jf = _default_J(W.space, J)
    Wf = Subspace(V, _float(W.basis))
    W0 = radical(Wf, pol)
    t = subspace_type(Wf, pol)
    if t.nplus == 0 or t.nminus == 0:
        # isotropic and coisotropic orbits coincide with their J-orbits
        return Wf, 0.0
    R = _reduce(W0, Jf, pol)
    Wt = R.reduced_subspace(Wf, pol)
    Ws, _, _ = _reduced_basepoints(t.nplus, t.nminus)
    Ep, Fp = _balanced_darboux(Wt.basis.to_numpy())
    Em, Fm = _balanced_darboux(symplectic_complement(Wt, pol).basis.to_numpy())
    g = Matrix.from_numpy(np.hstack([Ep, Em, Fp, Fm]))
    f = mostow_decompose(g, _triple_standard(t.nplus, t.nminus), "perp_par", pol)
    kW = f.k.to_numpy() @ Ws.to_numpy()
    out = Subspace.span(V, Matrix.from_numpy(np.hstack([W0.basis.to_numpy(), _float(R.complement_basis).to_numpy() @ kW])))
    if not in_gr_J(out, Jf, pol):
        raise InvariantError("γ_J output failed the Gr_J membership check")
    return out, f.residual


def beta_J(F: ComplexLagrangian, J: CompatibleJ | None = None, pol: TolerancePolicy | None = None) -> ComplexLagrangian:
    """Retraction of Lag^ℂ(n⃗) onto Lag_J^ℂ(n⃗)."""
    return _beta(F, J, pol)[0]


def _beta(F: ComplexLagrangian, J: CompatibleJ | None, pol: TolerancePolicy | None) -> tuple[ComplexLagrangian, float]:
    pol = pol or default_policy()
    V = _float_space(F.space)
    Jf = _default_J(F.space, J)
    t = lag_type(F, pol)
    W0 = radical_maps(F, pol)
    R = _reduce(W0, Jf, pol)
    m = t.nplus + t.nminus
    if m == 0:
        return make_lagrangian(_float(F.frame), V, pol), 0.0
    Ft = make_lagrangian(R.project(_float(F.frame), pol), R.space, pol)
    B = adapted_basis_lagrangianC(Ft, pol).vectors
    f = mostow_decompose(B, _triple_standard(t.nplus, t.nminus), "par_perp", pol)
    base = basepoint_frame(OrbitType(0, t.nplus, t.nminus)).to("complex").to_numpy()
    out = make_lagrangian(_assemble(V, W0, R, f.k.to_numpy() @ base), V, pol)
    if not membership_J(out, Jf, pol):
        raise InvariantError("β_J output failed the Lag_J membership check")
    return out, f.residual


def _split_transporter(S: SplitLagrangian, J: CompatibleJ, pol: TolerancePolicy):
    V = _float_space(S.space)
    t = split_type(S, pol)
    W0 = radical_maps(S, pol)
    R = _reduce(W0, J, pol)
    a = R.project(_float(S.geq0), pol)
    b = R.project(_float(S.leq0), pol)
    Fp = column_basis(a, pol).to_numpy()
    Fm = column_basis(b, pol).to_numpy()
    B = _split_adapted_basis(Fp.reshape(Fp.shape[0], -1), Fm.reshape(Fm.shape[0], -1), R.space) if R.m else np.zeros((0, 0))
    return V, t, W0, R, B


def _split_from_reduced(V, W0, R, t: OrbitType, g: np.ndarray, pol) -> SplitLagrangian:
    _, Fp, Fm = _reduced_basepoints(t.nplus, t.nminus)
    geq = _assemble(V, W0, R, g @ Fp.to_numpy())
    leq = _assemble(V, W0, R, g @ Fm.to_numpy())
    return make_split(V, geq, leq, pol)


def eta_J(S: SplitLagrangian, J: CompatibleJ | None = None, pol: TolerancePolicy | None = None) -> SplitLagrangian:
    """Retraction of Lag⊕(n⃗) onto Lag_{J,⊕}(n⃗) via g = k·exp(p)."""
    return _eta(S, J, pol)[0]


def _eta(S: SplitLagrangian, J: CompatibleJ | None, pol: TolerancePolicy | None) -> tuple[SplitLagrangian, float]:
    pol = pol or default_policy()
    Jf = _default_J(S.space, J)
    V, t, W0, R, B = _split_transporter(S, Jf, pol)
    if R.m == 0:
        return make_split(V, _float(S.geq0), _float(S.leq0), pol), 0.0
    k, P = polar_decompose(Matrix.from_numpy(B), pol)
    k = _nearest_unitary(k.to_numpy())
    residual = float(np.linalg.norm(k @ sym_apply(P.to_numpy(), np.exp) - B)) / max(1.0, float(np.linalg.norm(B)))
    out = _split_from_reduced(V, W0, R, t, k, pol)
    if not membership_J(out, Jf, pol):
        raise InvariantError("η_J output failed the Lag_{J,⊕} membership check")
    return out, residual


@dataclass(frozen=True)
class RetractionReport:
    output: object
    residual: float
    membership: bool


def retract(which: str, x, J: CompatibleJ | None = None, pol: TolerancePolicy | None = None) -> RetractionReport:
    """Apply γ_J, β_J or η_J and report the factorization residual and the membership verdict."""
    fns = {"gamma": (_gamma, Subspace), "beta": (_beta, ComplexLagrangian), "eta": (_eta, SplitLagrangian)}
    if which not in fns:
        raise InvariantError(f"unknown retraction {which!r}; expected gamma, beta or eta")
    fn, kind = fns[which]
    if not isinstance(x, kind):
        raise InvariantError(f"{which} needs a {kind.__name__}, got {type(x).__name__}")
    out, residual = fn(x, J, pol)
    Jf = _default_J(x.space, J)
    ok = in_gr_J(out, Jf, pol) if which == "gamma" else membership_J(out, Jf, pol)
    return RetractionReport(out, residual, ok)


def beta_eta_J(x, J: CompatibleJ | None = None, pol: TolerancePolicy | None = None):
    """β_J on complex Lagrangians, η_J on split ones."""
    if isinstance(x, SplitLagrangian):
        return eta_J(x, J, pol)
    if isinstance(x, ComplexLagrangian):
        return beta_J(x, J, pol)
    raise InvariantError(f"unsupported input {type(x).__name__}")


def chi_correction(
    S: SplitLagrangian,
    J: CompatibleJ | None = None,
    basepoint: SplitLagrangian | None = None,
    pol: TolerancePolicy | None = None,
) -> SplitLagrangian:
    """k·e^{p∥}·e^{p×}·b ↦ k·e^{p×}·e^{p∥}·b for a basepoint b in Lag_{J,⊕}
    with the same radical (default: the standard one).
    """
    pol = pol or default_policy()
    Jf = _default_J(S.space, J)
    V, t, W0, R, B = _split_transporter(S, Jf, pol)
    if t.nplus * t.nminus == 0:
        return make_split(V, _float(S.geq0), _float(S.leq0), pol)
    B0 = np.eye(B.shape[0])
    if basepoint is not None:
        if not membership_J(basepoint, Jf, pol):
            raise InvariantError("basepoint is not in Lag_{J,⊕}")
        Vb, tb, W0b, Rb, B0 = _split_transporter(basepoint, Jf, pol)
        if tb != t or not (W0b == W0):
            raise InvariantError("basepoint has a different type or radical")
        # same radical, so the reduced models agree up to a unitary change of frame
        C, Cb = _float(R.complement_basis).to_numpy(), _float(Rb.complement_basis).to_numpy()
        B0 = np.linalg.lstsq(C, Cb @ B0, rcond=None)[0]
    f = mostow_decompose(Matrix.from_numpy(np.linalg.solve(B0, B)), _triple_standard(t.nplus, t.nminus), "par_perp", pol)
    ex = sym_apply(f.p_par.to_numpy(), np.exp)
    ey = sym_apply(f.p_perp.to_numpy(), np.exp)
    g = B0 @ f.k.to_numpy() @ ey @ ex
    return _split_from_reduced(V, W0, R, t, g, pol)
