"""The unipotent stabilizer group of a subspace in structured form.

An element is stored as five blocks (E+, E-, F+, F-, Y) with
``Y - E+ F+ᵗ - E- F-ᵗ`` symmetric. Matrix views exist for three basis
orders of an adapted Darboux basis:

* ``darboux``: e0, e+, e-, f0, f+, f-
* ``triangular``: e0, e+, f+, e-, f-, f0 (upper unitriangular)
* ``ziegler``: e+, e-, e0, f+, f-, f0
"""

from __future__ import annotations

from dataclasses import dataclass

from .darboux import DarbouxBasis, check_splitting, darboux_extend
from .errors import InvariantError
from .numeric import (
    Matrix,
    TolerancePolicy,
    block,
    default_policy,
    hstack,
    inverse,
    rationalize,
    same_backend,
    solve,
)
from .space import OrbitType, Subspace, radical, standard_omega

FORMS = ("darboux", "triangular", "ziegler")


def _z(r: int, c: int, backend: str = "rational") -> Matrix:
    return Matrix.zeros(r, c, backend)


def _one(k: int, backend: str = "rational") -> Matrix:
    return Matrix.eye(k, backend)


@dataclass(frozen=True, eq=False)
class HeisenbergElement:
    t: OrbitType
    Eplus: Matrix
    Eminus: Matrix
    Fplus: Matrix
    Fminus: Matrix
    Y: Matrix

    def __post_init__(self):
        n0, npl, nmi = self.t
        shapes = {
            "Eplus": (n0, npl),
            "Eminus": (n0, nmi),
            "Fplus": (n0, npl),
            "Fminus": (n0, nmi),
            "Y": (n0, n0),
        }
        for name, shape in shapes.items():
            m = getattr(self, name)
            if m.shape != shape:
                raise InvariantError(f"{name} has shape {m.shape}, expected {shape}")
            if m.is_complex:
                raise InvariantError(f"{name} must be real")
        S = self.symmetric_part_defect()
        if not (S - S.T).is_zero():
            raise InvariantError("Y - E+F+ᵗ - E-F-ᵗ is not symmetric")

    def symmetric_part_defect(self) -> Matrix:
        Ep, Em, Fp, Fm, Y = same_backend(self.Eplus, self.Eminus, self.Fplus, self.Fminus, self.Y)
        return Y - Ep @ Fp.T - Em @ Fm.T

    @property
    def backend(self) -> str:
        return self.Y.backend

    def __eq__(self, other):
        if not isinstance(other, HeisenbergElement):
            return NotImplemented
        return self.t == other.t and all(
            getattr(self, k) == getattr(other, k) for k in ("Eplus", "Eminus", "Fplus", "Fminus", "Y")
        )

    __hash__ = None

    @property
    def is_central(self) -> bool:
        return all(getattr(self, k).is_zero() for k in ("Eplus", "Eminus", "Fplus", "Fminus"))


def heisenberg_identity(t: OrbitType, backend: str = "rational") -> HeisenbergElement:
    n0, p, m = t
    return HeisenbergElement(t, _z(n0, p, backend), _z(n0, m, backend), _z(n0, p, backend), _z(n0, m, backend), _z(n0, n0, backend))


def form_permutation(t: OrbitType, form: str) -> list[int]:
    """Darboux-order indices listed in the order of ``form``."""
    n0, p, m = t
    n = t.n
    e0 = list(range(n0))
    ep = list(range(n0, n0 + p))
    em = list(range(n0 + p, n))
    f0 = [n + i for i in e0]
    fp = [n + i for i in ep]
    fm = [n + i for i in em]
    if form == "darboux":
        return e0 + ep + em + f0 + fp + fm
    if form == "triangular":
        return e0 + ep + fp + em + fm + f0
    if form == "ziegler":
        return ep + em + e0 + fp + fm + f0
    raise InvariantError(f"unknown form {form!r}; expected one of {FORMS}")


def permute(M: Matrix, perm: list[int]) -> Matrix:
    return Matrix._fast(M.a[perm][:, perm].copy(), M.backend)


def _darboux_matrix(h: HeisenbergElement) -> Matrix:
    n0, p, m = h.t
    b = h.backend
    Ep, Em, Fp, Fm, Y = same_backend(h.Eplus, h.Eminus, h.Fplus, h.Fminus, h.Y)
    return block(
        [
            [_one(n0, b), Ep, Em, Y, Fp, Fm],
            [_z(p, n0, b), _one(p, b), _z(p, m, b), Fp.T, _z(p, p, b), _z(p, m, b)],
            [_z(m, n0, b), _z(m, p, b), _one(m, b), Fm.T, _z(m, p, b), _z(m, m, b)],
            [_z(n0, n0, b), _z(n0, p, b), _z(n0, m, b), _one(n0, b), _z(n0, p, b), _z(n0, m, b)],
            [_z(p, n0, b), _z(p, p, b), _z(p, m, b), -Ep.T, _one(p, b), _z(p, m, b)],
            [_z(m, n0, b), _z(m, p, b), _z(m, m, b), -Em.T, _z(m, p, b), _one(m, b)],
        ]
    )


def heisenberg_to_matrix(h: HeisenbergElement, form: str = "darboux") -> Matrix:
    """Matrix of h in the requested basis order."""
    M = _darboux_matrix(h)
    if form == "darboux":
        return M
    return permute(M, form_permutation(h.t, form))


def heisenberg_from_matrix(M: Matrix, t: OrbitType, form: str = "darboux", pol: TolerancePolicy | None = None) -> HeisenbergElement:
    """Read the blocks back from a matrix; raises if M is not of Heisenberg form."""
    perm = form_permutation(t, form)
    inv = [0] * len(perm)
    for k, p in enumerate(perm):
        inv[p] = k
    D = permute(M, inv) if form != "darboux" else M
    n0, p, m = t
    n = t.n
    if D.shape != (2 * n, 2 * n):
        raise InvariantError("matrix has the wrong size")
    h = HeisenbergElement(
        t,
        D[:n0, n0 : n0 + p],
        D[:n0, n0 + p : n],
        D[:n0, n + n0 : n + n0 + p],
        D[:n0, n + n0 + p :],
        D[:n0, n : n + n0],
    )
    diff = D - _darboux_matrix(h)
    if not diff.is_zero(pol):
        raise InvariantError("matrix is not of Heisenberg form")
    return h


def heisenberg_compose(h1: HeisenbergElement, h2: HeisenbergElement) -> HeisenbergElement:
    if h1.t != h2.t:
        raise InvariantError("Heisenberg elements of different types")
    a, b = same_backend(heisenberg_to_matrix(h1), heisenberg_to_matrix(h2))
    return heisenberg_from_matrix(a @ b, h1.t)


def heisenberg_inverse(h: HeisenbergElement) -> HeisenbergElement:
    return heisenberg_from_matrix(inverse(heisenberg_to_matrix(h)), h.t)


def heisenberg_dim(t: OrbitType) -> int:
    n0, p, m = t
    return 2 * n0 * p + 2 * n0 * m + n0 * (n0 + 1) // 2


def ziegler_convert(h: HeisenbergElement) -> tuple[Matrix, Matrix, Matrix]:
    """(λ, μ, x) = ((E+ E-), (F+ F-), -Y)."""
    Ep, Em, Fp, Fm, Y = same_backend(h.Eplus, h.Eminus, h.Fplus, h.Fminus, h.Y)
    return hstack(Ep, Em), hstack(Fp, Fm), -Y


def ziegler_unconvert(lam: Matrix, mu: Matrix, x: Matrix, t: OrbitType) -> HeisenbergElement:
    n0, p, m = t
    return HeisenbergElement(t, lam[:, :p], lam[:, p:], mu[:, :p], mu[:, p:], -x)


# ---------------------------------------------------------------- Levi factor


@dataclass(frozen=True, eq=False)
class LeviElement:
    X: Matrix
    gplus: Matrix
    gminus: Matrix

    def __post_init__(self):
        if self.X.rows != self.X.cols:
            raise InvariantError("X must be square")
        for name, g in (("gplus", self.gplus), ("gminus", self.gminus)):
            k = g.rows
            if g.shape != (k, k) or k % 2:
                raise InvariantError(f"{name} must be square of even size")
            if k:
                om = standard_omega(k // 2, g.backend)
                if not (g.T @ om @ g - om).is_zero():
                    raise InvariantError(f"{name} is not symplectic")
        if self.X.rows:
            inverse(self.X)

    @property
    def t(self) -> OrbitType:
        return OrbitType(self.X.rows, self.gplus.rows // 2, self.gminus.rows // 2)


def _embed_pair(out, g: Matrix, e_idx: list[int], f_idx: list[int]):
    k = len(e_idx)
    idx = e_idx + f_idx
    for a in range(2 * k):
        for c in range(2 * k):
            out[idx[a], idx[c]] = g.a[a, c]


def levi_embed(l: LeviElement) -> Matrix:
    """diag(X, g+, g-, X⁻ᵗ) placed on the Darboux-order coordinates."""
    t = l.t
    n0, p, m = t
    n = t.n
    X, gp, gm = same_backend(l.X, l.gplus, l.gminus)
    b = X.backend
    out = Matrix.zeros(2 * n, 2 * n, b).a.copy()
    out[:n0, :n0] = X.a
    if n0:
        out[n : n + n0, n : n + n0] = inverse(X).T.a
    _embed_pair(out, gp, list(range(n0, n0 + p)), list(range(n + n0, n + n0 + p)))
    _embed_pair(out, gm, list(range(n0 + p, n)), list(range(n + n0 + p, 2 * n)))
    return Matrix._fast(out, b)


def unitary_embed(X: Matrix, u: Matrix, t: OrbitType, pol: TolerancePolicy | None = None) -> Matrix:
    """Real symplectic matrix of (X, u) with u ∈ U(n+, n-) in Darboux order.

    u is written in the basis (e+ - i f+)/√2, -i(e- + i f-)/√2 on which κ/2
    is diag(1, -1). The real blocks are Re/Im of the four blocks of u.
    """
    n0, p, m = t
    if X.shape != (n0, n0) or u.shape != (p + m, p + m):
        raise InvariantError("blocks do not match the type")
    from .lagrangian import as_complex

    uc = as_complex(u)
    eta = Matrix.eye(p + m, uc.backend).a.copy()
    for k in range(p, p + m):
        eta[k, k] = -eta[k, k]
    eta = Matrix._fast(eta, uc.backend)
    if not (uc.H @ eta @ uc - eta).is_zero(pol):
        raise InvariantError("u does not preserve the form diag(1, -1)")
    R, Im = uc.real(), uc.imag()
    Xr, R, Im = same_backend(X, R, Im)
    b = R.backend
    R_pp, R_pm, R_mp, R_mm = R[:p, :p], R[:p, p:], R[p:, :p], R[p:, p:]
    I_pp, I_pm, I_mp, I_mm = Im[:p, :p], Im[:p, p:], Im[p:, :p], Im[p:, p:]
    Xit = inverse(Xr).T if n0 else Xr
    z = _z
    return block(
        [
            [Xr, z(n0, p, b), z(n0, m, b), z(n0, n0, b), z(n0, p, b), z(n0, m, b)],
            [z(p, n0, b), R_pp, R_pm, z(p, n0, b), -I_pp, I_pm],
            [z(m, n0, b), R_mp, R_mm, z(m, n0, b), -I_mp, I_mm],
            [z(n0, n0, b), z(n0, p, b), z(n0, m, b), Xit, z(n0, p, b), z(n0, m, b)],
            [z(p, n0, b), I_pp, I_pm, z(p, n0, b), R_pp, -R_pm],
            [z(m, n0, b), -I_mp, -I_mm, z(m, n0, b), -R_mp, R_mm],
        ]
    )


# ---------------------------------------------------------------- factorization


def _exact(M: Matrix, pol: TolerancePolicy) -> Matrix:
    return M if M.is_exact else rationalize(M)


def factor_stabilizer(g: Matrix, basis: DarbouxBasis, pol: TolerancePolicy | None = None) -> tuple[LeviElement, HeisenbergElement]:
    """B⁻¹ g B = levi_embed(L) · heisenberg_to_matrix(H) for g stabilizing W.

    W = span{e0, e+, f+} of the adapted basis B. Float inputs are
    rationalized first.
    """
    pol = pol or default_policy()
    t = basis.labels
    n0, p, m = t
    n = t.n
    B = _exact(basis.vectors, pol)
    g = _exact(g, pol)
    B, g = same_backend(B, g)
    G = inverse(B) @ g @ B
    om = standard_omega(n, G.backend)
    if not (G.T @ om @ G - om).is_zero():
        raise InvariantError("g is not symplectic")
    e0 = list(range(n0))
    ep = list(range(n0, n0 + p))
    em = list(range(n0 + p, n))
    f0 = [n + i for i in e0]
    fp = [n + i for i in ep]
    fm = [n + i for i in em]
    W = e0 + ep + fp
    outside_W = em + f0 + fm
    if any(G.a[r, c] for r in outside_W for c in W):
        raise InvariantError("g does not stabilize W")
    X = Matrix._fast(G.a[e0][:, e0].copy().reshape(n0, n0), G.backend)
    gp = Matrix._fast(G.a[ep + fp][:, ep + fp].copy().reshape(2 * p, 2 * p), G.backend)
    gm = Matrix._fast(G.a[em + fm][:, em + fm].copy().reshape(2 * m, 2 * m), G.backend)
    L = LeviElement(X, gp, gm)
    H = heisenberg_from_matrix(inverse(levi_embed(L)) @ G, t)
    if levi_embed(L) @ heisenberg_to_matrix(H) != G:
        raise InvariantError("factorization does not reproduce g")
    return L, H


def splitting_transporter(
    s1, s2, W: Subspace, pol: TolerancePolicy | None = None
) -> HeisenbergElement:
    """The unique h in the unipotent stabilizer with h·s1 = s2, in the adapted
    basis of (W, s1).
    """
    pol = pol or default_policy()
    check_splitting(W, s1, pol)
    check_splitting(W, s2, pol)
    D1 = darboux_extend(W, s1, pol)
    t = D1.labels
    V = W.space
    W0 = radical(W, pol).basis
    e0, ep, fp, em, fm, f0 = D1.e0, D1.eplus, D1.fplus, D1.eminus, D1.fminus, D1.f0

    def project(vs: Matrix, target: Matrix) -> Matrix:
        # component in ``target`` of vs along the radical
        if vs.cols == 0:
            return vs
        A, vs2 = same_backend(hstack(target, W0), vs)
        coeff = solve(A, vs2, pol)
        return A[:, : target.cols] @ coeff[: target.cols, :]

    Wp2, Wm2, Wc2 = s2.Wplus.basis, s2.Wminus.basis, s2.W0comp.basis
    ep2, fp2 = project(ep, Wp2), project(fp, Wp2)
    em2, fm2 = project(em, Wm2), project(fm, Wm2)
    if t.n0:
        e0c, c = same_backend(e0, Wc2)
        f02 = c @ inverse(V.pairing(e0c, c), pol)
    else:
        f02 = f0
    B1 = D1.vectors
    parts = same_backend(B1, e0, ep2, em2, f02, fp2, fm2)
    B1 = parts[0]
    B2 = hstack(*parts[1:])
    G = inverse(B1, pol) @ B2
    if not G.is_exact:
        G = rationalize(G)
    return heisenberg_from_matrix(G, t)
