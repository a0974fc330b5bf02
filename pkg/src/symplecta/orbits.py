"""Orbit closures, orbit dimensions via stabilizer algebras, and degenerations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantError
from .lagrangian import (
    ComplexLagrangian,
    SplitLagrangian,
    adapted_basis_lagrangianC,
    basepoint,
    lag_type,
    make_lagrangian,
    split_basepoint,
)
from .numeric import (
    Matrix,
    TolerancePolicy,
    default_policy,
    hstack,
    inverse,
    nullspace,
    projector_distance,
    rank_and_nullspace,
    vstack,
)
from .space import OrbitType, SymplecticSpace, Subspace

KINDS = ("Gr", "Lag", "LagSplit")


@dataclass(frozen=True)
class StabilizerAlgebra:
    basis: list
    dim: int


def sp_basis(V: SymplecticSpace) -> list[Matrix]:
    """Ω⁻¹S for the elementary symmetric S; spans {X : ΩX + XᵗΩ = 0}."""
    d = V.dim
    om = V.form("rational") if V.omega.is_exact else V.form("float")
    om_inv = inverse(om)
    out = []
    for i in range(d):
        for j in range(i, d):
            S = Matrix.zeros(d, d, om.backend).a.copy()
            S[i, j] = S[i, j] + 1
            if i != j:
                S[j, i] = S[j, i] + 1
            out.append(om_inv @ Matrix._fast(S, om.backend))
    return out


def _invariance_rows(basis: list[Matrix], frame: Matrix, pol: TolerancePolicy) -> Matrix:
    """Rows expressing Ann(frame)·X·frame = 0 as linear equations in the basis coefficients."""
    ann = nullspace(frame.T, pol)
    cols = []
    for X in basis:
        Xb = X.to(frame.backend) if X.backend != frame.backend else X
        C = ann.T @ Xb @ frame
        vec = Matrix._fast(C.a.reshape(-1, 1).copy(), C.backend)
        if vec.is_complex:
            vec = vstack(vec.real(), vec.imag())
        cols.append(vec)
    return hstack(*cols)


def stabilizer_algebra(subject, pol: TolerancePolicy | None = None) -> StabilizerAlgebra:
    """Real matrices in sp(2n) mapping each defining span of ``subject`` into itself."""
    pol = pol or default_policy()
    if isinstance(subject, Subspace):
        V, frames = subject.space, [subject.basis]
    elif isinstance(subject, ComplexLagrangian):
        V, frames = subject.space, [subject.frame]
    elif isinstance(subject, SplitLagrangian):
        V, frames = subject.space, [subject.geq0, subject.leq0]
    else:
        raise InvariantError(f"unsupported subject {type(subject).__name__}")
    basis = sp_basis(V)
    blocks = [_invariance_rows(basis, f, pol) for f in frames if 0 < f.cols < V.dim]
    if not blocks:
        return StabilizerAlgebra(basis, len(basis))
    A = vstack(*blocks)
    if A.is_complex:
        A = A.real()
    _, N = rank_and_nullspace(A, pol)
    out = []
    for k in range(N.cols):
        X = Matrix.zeros(V.dim, V.dim, basis[0].backend)
        for c, B in zip(N.a[:, k], basis):
            if c:
                X = X + B * c
        out.append(X)
    return StabilizerAlgebra(out, N.cols)


def orbit_dim(kind: str, t: OrbitType, n: int | None = None) -> int:
    n = t.n if n is None else n
    if t.n != n:
        raise InvariantError(f"type {tuple(t)} does not match n={n}")
    n0, p, m = t
    base = n * n + n - n0 * (n0 + 1) // 2
    if kind == "Lag":
        return base
    if kind == "LagSplit":
        return base + 2 * p * m
    if kind == "Gr":
        return base - (p - m) ** 2 - p - m
    raise InvariantError(f"unknown kind {kind!r}; expected one of {KINDS}")


def standard_subspace(t: OrbitType) -> Subspace:
    """span{e0, e+, f+} in the standard Darboux coordinates."""
    n = t.n
    I = Matrix.eye(2 * n)
    idx = list(range(t.n0 + t.nplus)) + [n + j for j in range(t.n0, t.n0 + t.nplus)]
    return Subspace(SymplecticSpace.standard(n), I.columns(idx))


def orbit_basepoint(kind: str, t: OrbitType):
    if kind == "Gr":
        return standard_subspace(t)
    if kind == "Lag":
        return basepoint(t)
    if kind == "LagSplit":
        return split_basepoint(t)
    raise InvariantError(f"unknown kind {kind!r}; expected one of {KINDS}")


def orbit_dim_by_stabilizer(kind: str, t: OrbitType, pol: TolerancePolicy | None = None) -> int:
    n = t.n
    return n * (2 * n + 1) - stabilizer_algebra(orbit_basepoint(kind, t), pol).dim


def incidence(kind: str, t: OrbitType, t2: OrbitType) -> bool:
    """Whether the orbit of type t2 lies in the closure of the orbit of type t."""
    if t.n != t2.n:
        raise InvariantError("types live in different dimensions")
    if kind == "Gr":
        if t.n0 + 2 * t.nplus != t2.n0 + 2 * t2.nplus:
            raise InvariantError("real orbits of different subspace dimension")
        return t2.nplus <= t.nplus
    if kind in ("Lag", "LagSplit"):
        return t2.nplus <= t.nplus and t2.nminus <= t.nminus
    raise InvariantError(f"unknown kind {kind!r}; expected one of {KINDS}")


def frame_distance(A, B, pol: TolerancePolicy | None = None) -> float:
    """Frobenius distance between the orthogonal projectors of two spans."""
    fa = A.frame if isinstance(A, ComplexLagrangian) else A
    fb = B.frame if isinstance(B, ComplexLagrangian) else B
    return projector_distance(fa.to("complex") if fa.backend != "complex" else fa,
                              fb.to("complex") if fb.backend != "complex" else fb, pol)


def degeneration_path(
    target: ComplexLagrangian, t: OrbitType, eps: float, pol: TolerancePolicy | None = None
) -> ComplexLagrangian:
    """A Lagrangian of type t within O(eps) of ``target``.

    In the adapted basis of ``target`` the first null columns e0_j become
    e0_j - i·eps·f0_j (positive) and the next ones e0_j + i·eps·f0_j (negative).
    """
    pol = pol or default_policy()
    t2 = lag_type(target, pol)
    if not incidence("Lag", t, t2):
        raise InvariantError(f"type {tuple(t2)} is not in the closure of type {tuple(t)}")
    if t == t2:
        return target
    if eps <= 0:
        raise InvariantError("eps must be positive")
    B = adapted_basis_lagrangianC(target, pol)
    e0, ep, em = B.e0.to_numpy(), B.eplus.to_numpy(), B.eminus.to_numpy()
    f0, fp, fm = B.f0.to_numpy(), B.fplus.to_numpy(), B.fminus.to_numpy()
    dp = t.nplus - t2.nplus
    dm = t.nminus - t2.nminus
    null = e0.astype(complex)
    null[:, :dp] -= 1j * eps * f0[:, :dp]
    null[:, dp : dp + dm] += 1j * eps * f0[:, dp : dp + dm]
    frame = np.hstack([null, ep - 1j * fp, em + 1j * fm])
    return make_lagrangian(Matrix.from_numpy(frame), SymplecticSpace(target.n, target.space.form("float")), pol)


def complex_symplectic_path(F: ComplexLagrangian, direction: np.ndarray, s: float) -> ComplexLagrangian:
    """Cayley-transform path g(s)·F with g(s) ∈ Sp(2n, ℂ) generated by Ω⁻¹·direction."""
    om = F.space.form("float").to_numpy()
    X = np.linalg.solve(om, 0.5 * (direction + direction.T)) * s
    I = np.eye(om.shape[0])
    g = np.linalg.solve(I - X / 2, I + X / 2)
    frame = F.frame.to("complex").to_numpy() if F.frame.backend != "complex" else F.frame.to_numpy()
    return make_lagrangian(Matrix.from_numpy(g @ frame), SymplecticSpace(F.n, F.space.form("float")))
