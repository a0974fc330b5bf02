"""Structure theory of sp(2n; ℝ) in standard Darboux coordinates (e's first).

Exact data lives on the rational or gaussian backends. Finite SU(2)
elements whose entries involve 1/√2 are stored as A + √2·B with gaussian A, B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .darboux import DarbouxBasis
from .errors import InvariantError
from .lagrangian import make_lagrangian
from .numeric import (
    Gaussian,
    Matrix,
    TolerancePolicy,
    column_basis,
    default_policy,
    hstack,
    inverse,
    rank,
    same_backend,
    solve,
    vstack,
)
from .space import OrbitType, SymplecticSpace, standard_J, standard_omega

HALF = Fraction(1, 2)


def _E(n: int, j: int, l: int, backend: str = "rational") -> Matrix:
    a = Matrix.zeros(n, n, backend).a.copy()
    a[j, l] = a[j, l] + 1
    return Matrix._fast(a, backend)


def _blocks(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Matrix:
    return vstack(hstack(a, b), hstack(c, d))


def bracket(X: Matrix, Y: Matrix) -> Matrix:
    X, Y = same_backend(X, Y)
    return X @ Y - Y @ X


def _vec(M: Matrix) -> Matrix:
    return Matrix._fast(M.a.reshape(-1, 1).copy(), M.backend)


def in_sp(X: Matrix, pol: TolerancePolicy | None = None) -> bool:
    n = X.rows // 2
    om = standard_omega(n, X.backend if X.is_exact else "float")
    om, X2 = same_backend(om, X)
    return (om @ X2 + X2.T @ om).is_zero(pol)


# ---------------------------------------------------------------- Cartan decomposition


@dataclass(frozen=True)
class LieContext:
    n: int
    basis_g: list
    basis_k: list
    basis_p: list
    J: Matrix


def _sym_basis(n: int) -> list[Matrix]:
    out = []
    for j in range(n):
        for l in range(j, n):
            out.append(_E(n, j, j) if j == l else _E(n, j, l) + _E(n, l, j))
    return out


def _antisym_basis(n: int) -> list[Matrix]:
    return [_E(n, j, l) - _E(n, l, j) for j in range(n) for l in range(j + 1, n)]


def sp_standard_basis(n: int) -> list[Matrix]:
    """[[a, b], [c, -aᵗ]] with a = E_jl, then b symmetric, then c symmetric."""
    Z = Matrix.zeros(n, n)
    out = [_blocks(_E(n, j, l), Z, Z, -_E(n, l, j)) for j in range(n) for l in range(n)]
    out += [_blocks(Z, S, Z, Z) for S in _sym_basis(n)]
    out += [_blocks(Z, Z, S, Z) for S in _sym_basis(n)]
    return out


def sp_coordinates(X: Matrix) -> list:
    """Coordinates of X in ``sp_standard_basis``."""
    n = X.rows // 2
    a = X.a
    coords = [a[j, l] for j in range(n) for l in range(n)]
    coords += [a[j, n + l] for j in range(n) for l in range(j, n)]
    coords += [a[n + j, l] for j in range(n) for l in range(j, n)]
    return coords


def cartan_context(n: int) -> LieContext:
    if n < 1:
        raise InvariantError("n must be positive")
    Z = Matrix.zeros(n, n)
    k = [_blocks(A, Z, Z, A) for A in _antisym_basis(n)]
    k += [_blocks(Z, -B, B, Z) for B in _sym_basis(n)]
    p = [_blocks(A, B, B, -A) for A in _sym_basis(n) for B in [Z]]
    p += [_blocks(Z, B, B, Z) for B in _sym_basis(n)]
    return LieContext(n, sp_standard_basis(n), k, p, standard_J(n))


def ad_J_half(X: Matrix) -> Matrix:
    """½ ad(J) X."""
    J = standard_J(X.rows // 2, X.backend)
    return bracket(J, X) * HALF


def killing_form(X: Matrix, Y: Matrix, pol: TolerancePolicy | None = None):
    """2(n+1)·Tr(aa' + a'a + bc' + cb') for X = [[a, b], [c, -aᵗ]]."""
    for M in (X, Y):
        if not in_sp(M, pol):
            raise InvariantError("Killing form needs elements of sp(2n)")
    X, Y = same_backend(X, Y)
    n = X.rows // 2
    a, b, c = X[:n, :n], X[:n, n:], X[n:, :n]
    a2, b2, c2 = Y[:n, :n], Y[:n, n:], Y[n:, :n]
    S = a @ a2 + a2 @ a + b @ c2 + c @ b2
    return 2 * (n + 1) * sum(S.a[i, i] for i in range(n))


def ad_matrix(X: Matrix, basis: list[Matrix] | None = None) -> Matrix:
    """Matrix of ad X on sp(2n) in ``sp_standard_basis`` coordinates."""
    n = X.rows // 2
    basis = basis or sp_standard_basis(n)
    cols = [sp_coordinates(bracket(X, B.to(X.backend) if B.backend != X.backend else B)) for B in basis]
    return Matrix._fast(np.array(cols, dtype=object).T.copy(), X.backend) if X.is_exact else Matrix.from_numpy(np.array(cols, dtype=float).T)


def killing_ad_trace(X: Matrix, Y: Matrix):
    """Tr(ad X ∘ ad Y) computed on the standard basis."""
    A, B = same_backend(ad_matrix(X), ad_matrix(Y))
    P = A @ B
    return sum(P.a[i, i] for i in range(P.rows))


# ---------------------------------------------------------------- vectorial Cartan subalgebras


def cartan_from_darboux(basis: DarbouxBasis | Matrix) -> list[Matrix]:
    """span{B (E_jj ⊕ -E_jj) B⁻¹}: the Cartan subalgebra diagonal in the basis B."""
    B = basis.vectors if isinstance(basis, DarbouxBasis) else basis
    n = B.rows // 2
    Bi = inverse(B)
    out = []
    for j in range(n):
        D = _blocks(_E(n, j, j), Matrix.zeros(n, n), Matrix.zeros(n, n), -_E(n, j, j))
        D, B2, Bi2 = same_backend(D, B, Bi)
        out.append(B2 @ D @ Bi2)
    return out


@dataclass(frozen=True)
class WeightLine:
    weight: tuple
    line: Matrix


def darboux_from_cartan(cartan: list[Matrix], pol: TolerancePolicy | None = None) -> tuple[list[WeightLine], DarbouxBasis]:
    """Joint eigenlines of a vectorial Cartan subalgebra and a Darboux basis built from them.

    Each basis element must be real-diagonalizable with real spectrum and the
    elements must commute; otherwise the span is not inside any p.
    """
    pol = pol or default_policy()
    mats = [M.to("float").to_numpy() if M.backend != "float" else M.to_numpy() for M in cartan]
    d = mats[0].shape[0]
    n = d // 2
    if len(mats) != n:
        raise InvariantError("a vectorial Cartan subalgebra of sp(2n) has dimension n")
    for A in mats:
        for B in mats:
            if np.linalg.norm(A @ B - B @ A) > pol.residual_tol * max(1.0, np.linalg.norm(A) * np.linalg.norm(B)):
                raise InvariantError("Cartan elements do not commute")
    coeffs = np.array([math.sqrt(2) ** k + 0.1 * k for k in range(1, n + 1)])
    X = sum(c * A for c, A in zip(coeffs, mats))
    w, Vec = np.linalg.eig(X)
    if np.max(np.abs(w.imag), initial=0.0) > 1e3 * pol.rank_tol * max(1.0, np.max(np.abs(w))):
        raise InvariantError("Cartan element has non-real spectrum; not contained in any p")
    if np.linalg.matrix_rank(Vec, tol=1e3 * pol.rank_tol) != d:
        raise InvariantError("Cartan element is not diagonalizable")
    w = w.real
    Vec = Vec.real
    lines = []
    for k in range(d):
        v = Vec[:, k]
        v = v / v[np.argmax(np.abs(v))]
        weight = tuple(float(round((A @ v)[np.argmax(np.abs(v))], 12)) for A in mats)
        lines.append(WeightLine(weight, Matrix.from_numpy(v.reshape(-1, 1))))
    # pair each positive-first weight with its negative
    om = standard_omega(n, "float").to_numpy()
    order = sorted(range(d), key=lambda k: -w[k])
    pos = order[:n]
    E, F = [], []
    for k in pos:
        target = -np.array(lines[k].weight)
        match = min(range(d), key=lambda m: np.linalg.norm(np.array(lines[m].weight) - target))
        e = Vec[:, k]
        f = Vec[:, match]
        s = f @ om @ e  # ω(e, f)
        if abs(s) < pol.rank_tol:
            raise InvariantError("weight lines do not pair symplectically")
        E.append(e)
        F.append(f / s)
    B = Matrix.from_numpy(np.column_stack(E + F))
    return lines, DarbouxBasis(B, OrbitType(0, n, 0))


# ---------------------------------------------------------------- root data


@dataclass(frozen=True)
class Root:
    label: str
    values: tuple
    vector: Matrix
    coroot: Matrix
    positive: bool
    strongly_orthogonal: bool = False
    compact: bool | None = None


@dataclass(frozen=True)
class RootDatum:
    which: str
    n: int
    cartan: list
    roots: list = field(default_factory=list)

    def root(self, label: str) -> Root:
        for r in self.roots:
            if r.label == label:
                return r
        raise KeyError(label)

    def negative(self, r: Root) -> Root:
        for s in self.roots:
            if all(a == -b for a, b in zip(s.values, r.values)):
                return s
        raise KeyError(r.label)


def _sym(n: int, j: int, l: int, backend: str = "rational") -> Matrix:
    # long roots use E_jj so that φ(h_φ) = 2
    return _E(n, j, j, backend) if j == l else _E(n, j, l, backend) + _E(n, l, j, backend)


def _cartan_basis(which: str, n: int) -> list[Matrix]:
    Z = Matrix.zeros(n, n)
    if which == "a":
        return [_blocks(_E(n, k, k), Z, Z, -_E(n, k, k)) for k in range(n)]
    if which == "h":
        return [_blocks(Z, _E(n, k, k), _E(n, k, k), Z) for k in range(n)]
    if which == "t":
        return [_blocks(Z, -_E(n, k, k), _E(n, k, k), Z).to("gaussian") for k in range(n)]
    raise InvariantError(f"unknown Cartan {which!r}; expected a, h or t")


def _coefficient_in_cartan(X: Matrix, cartan: list[Matrix]) -> list:
    A = hstack(*[_vec(H.to(X.backend) if H.backend != X.backend else H) for H in cartan])
    c = solve(A, _vec(X))
    return [c.a[k, 0] for k in range(c.rows)]


def _functional(values: tuple, coeffs: list):
    return sum((v * c for v, c in zip(values, coeffs)), Fraction(0))


def _real_roots(which: str, n: int, cartan: list[Matrix]) -> list[Root]:
    Z = Matrix.zeros(n, n)
    sym = "μ" if which == "a" else "δ"
    pos: list[tuple[str, tuple, Matrix, Matrix]] = []
    for j in range(n):
        for l in range(n):
            if j == l:
                continue
            A = _E(n, j, l) - _E(n, l, j)
            S = _E(n, j, l) + _E(n, l, j)
            if which == "a":
                v = _blocks(_E(n, j, l), Z, Z, -_E(n, l, j))
            else:
                v = _blocks(A, S, S, A)
            vals = tuple(Fraction((k == j) - (k == l)) for k in range(n))
            pos.append((f"{sym}{j + 1}-{sym}{l + 1}", vals, v, None))
    for j in range(n):
        for l in range(j, n):
            S = _sym(n, j, l)
            vals = tuple(Fraction((k == j) + (k == l)) for k in range(n))
            if which == "a":
                vp, vm = _blocks(Z, S, Z, Z), _blocks(Z, Z, S, Z)
            else:
                vp, vm = _blocks(-S, S, -S, S), _blocks(-S, -S, S, S)
            pos.append((f"{sym}{j + 1}+{sym}{l + 1}", vals, vp, None))
            pos.append((f"-{sym}{j + 1}-{sym}{l + 1}", tuple(-x for x in vals), vm, None))
    roots = []
    by_vals = {vals: (label, vec) for label, vals, vec, _ in pos}
    for label, vals, vec, _ in pos:
        neg = tuple(-x for x in vals)
        nlabel, nvec = by_vals[neg]
        b = bracket(vec, nvec)
        c = _coefficient_in_cartan(b, cartan)
        phi_b = _functional(vals, c)
        positive = _is_positive(vals)
        # rescale so that [e_φ, e_-φ] = h_φ with φ(h_φ) = 2; the scale is put on the negative root
        scale = Fraction(2) / phi_b if positive else Fraction(1)
        h = b * scale if positive else None
        roots.append((label, vals, vec, h, positive, scale))
    out = []
    scales = {vals: scale for label, vals, vec, h, positive, scale in roots if positive}
    cor = {vals: h for label, vals, vec, h, positive, scale in roots if positive}
    for label, vals, vec, h, positive, scale in roots:
        if positive:
            out.append(Root(label, vals, vec, h, True, _is_long(vals)))
        else:
            pv = tuple(-x for x in vals)
            out.append(Root(label, vals, vec * scales[pv], -cor[pv], False, False))
    return out


def _is_positive(vals: tuple) -> bool:
    for v in vals:
        if v != 0:
            re = v.re if isinstance(v, Gaussian) else v
            im = v.im if isinstance(v, Gaussian) else 0
            return (re if re != 0 else im) > 0
    return False


def _is_long(vals: tuple) -> bool:
    nz = [v for v in vals if v != 0]
    return len(nz) == 1


def _t_roots(n: int) -> list[Root]:
    g = "gaussian"
    i = Gaussian(0, 1)
    Z = Matrix.zeros(n, n, g)
    out = []

    def coroot(j: int, l: int, sign_l: int, sign: int) -> Matrix:
        d = _E(n, j, j, g) if j == l else _E(n, j, j, g) + _E(n, l, l, g) * sign_l
        return _blocks(Z, d * (i * sign), -d * (i * sign), Z)

    for j in range(n):
        for l in range(n):
            if j == l:
                continue
            A = _E(n, j, l, g) - _E(n, l, j, g)
            S = _E(n, j, l, g) + _E(n, l, j, g)
            vec = _blocks(A, S * i, -S * i, A) * HALF
            vals = tuple(i * ((k == j) - (k == l)) for k in range(n))
            out.append(Root(f"iε{j + 1}-iε{l + 1}", vals, vec, coroot(j, l, -1, 1), j < l, False, True))
    for j in range(n):
        for l in range(j, n):
            S = _sym(n, j, l, g)
            vals = tuple(i * ((k == j) + (k == l)) for k in range(n))
            vp = _blocks(-S, S * i, S * i, S) * HALF
            vm = _blocks(-S, -S * i, -S * i, S) * HALF
            out.append(Root(f"iε{j + 1}+iε{l + 1}", vals, vp, coroot(j, l, 1, 1), True, j == l, False))
            out.append(Root(f"-iε{j + 1}-iε{l + 1}", tuple(-x for x in vals), vm, coroot(j, l, 1, -1), False, False, False))
    return out


def root_data(which: str, n: int) -> RootDatum:
    if n < 1:
        raise InvariantError("n must be positive")
    cartan = _cartan_basis(which, n)
    roots = _t_roots(n) if which == "t" else _real_roots(which, n, cartan)
    return RootDatum(which, n, cartan, roots)


def check_root(datum: RootDatum, r: Root) -> bool:
    """[H, e_φ] = φ(H) e_φ on the Cartan basis, [e_φ, e_-φ] = h_φ and φ(h_φ) = 2."""
    for H, val in zip(datum.cartan, r.values):
        v = r.vector
        H2, v2 = same_backend(H, v)
        if bracket(H2, v2) != v2 * val:
            return False
    neg = datum.negative(r)
    if bracket(r.vector, neg.vector) != r.coroot.to(r.vector.backend) if r.coroot.backend != r.vector.backend else bracket(r.vector, neg.vector) != r.coroot:
        return False
    c = _coefficient_in_cartan(r.coroot, datum.cartan)
    return _functional(r.values, c) == 2


# ---------------------------------------------------------------- √2-extended gaussian matrices


@dataclass(frozen=True, eq=False)
class RootTwoMatrix:
    """A + √2·B with gaussian A and B."""

    A: Matrix
    B: Matrix

    @classmethod
    def of(cls, A, B=None) -> RootTwoMatrix:
        A = A if isinstance(A, Matrix) else Matrix(A, "gaussian")
        A = A.to("gaussian") if A.backend != "gaussian" else A
        if B is None:
            B = Matrix.zeros(A.rows, A.cols, "gaussian")
        B = B if isinstance(B, Matrix) else Matrix(B, "gaussian")
        B = B.to("gaussian") if B.backend != "gaussian" else B
        return cls(A, B)

    @classmethod
    def over_root_two(cls, M) -> RootTwoMatrix:
        """M / √2 = √2·(M/2)."""
        M = cls.of(M).A
        return cls(Matrix.zeros(M.rows, M.cols, "gaussian"), M * HALF)

    def __matmul__(self, o: RootTwoMatrix) -> RootTwoMatrix:
        return RootTwoMatrix(self.A @ o.A + (self.B @ o.B) * 2, self.A @ o.B + self.B @ o.A)

    def __add__(self, o: RootTwoMatrix) -> RootTwoMatrix:
        return RootTwoMatrix(self.A + o.A, self.B + o.B)

    def __neg__(self) -> RootTwoMatrix:
        return RootTwoMatrix(-self.A, -self.B)

    def scale(self, s) -> RootTwoMatrix:
        return RootTwoMatrix(self.A * s, self.B * s)

    @property
    def H(self) -> RootTwoMatrix:
        return RootTwoMatrix(self.A.H, self.B.H)

    @property
    def shape(self):
        return self.A.shape

    def __eq__(self, o):
        if not isinstance(o, RootTwoMatrix):
            return NotImplemented
        return self.A == o.A and self.B == o.B

    def __hash__(self):
        return hash((tuple(map(tuple, self.A.a.tolist())), tuple(map(tuple, self.B.a.tolist()))))

    def to_numpy(self) -> np.ndarray:
        return self.A.to_numpy() + math.sqrt(2) * self.B.to_numpy()

    def __repr__(self):
        return f"RootTwoMatrix({self.to_numpy().round(6).tolist()})"


def _g(rows) -> RootTwoMatrix:
    return RootTwoMatrix.of(Matrix([[Gaussian(*x) if isinstance(x, tuple) else Gaussian(x) for x in r] for r in rows], "gaussian"))


ONE = _g([[1, 0], [0, 1]])
SIGMA1 = _g([[0, 1], [1, 0]])
SIGMA2 = _g([[0, (0, -1)], [(0, 1), 0]])
SIGMA3 = _g([[1, 0], [0, -1]])
QI = SIGMA1.scale(Gaussian(0, -1))
QJ = SIGMA2.scale(Gaussian(0, -1))
QK = SIGMA3.scale(Gaussian(0, -1))
SQRT_I = RootTwoMatrix.over_root_two((ONE + QI).A)
SQRT_J = RootTwoMatrix.over_root_two((ONE + QJ).A)
SQRT_K = RootTwoMatrix.over_root_two((ONE + QK).A)


@dataclass(frozen=True)
class GroupElementFinite:
    matrix: RootTwoMatrix
    label: str


def generate_group(generators: list[RootTwoMatrix], limit: int = 1000) -> list[RootTwoMatrix]:
    """Closure under multiplication (finite groups only)."""
    elems = [ONE]
    seen = {ONE}
    frontier = [ONE]
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = x @ g
                if y not in seen:
                    seen.add(y)
                    elems.append(y)
                    nxt.append(y)
                    if len(elems) > limit:
                        raise InvariantError("group closure exceeded the element limit")
        frontier = nxt
    return elems


def binary_octahedral() -> list[GroupElementFinite]:
    # ⟨√i, 𝐣⟩ is only binary dihedral of order 16, since 𝐣·√i·𝐣⁻¹ = √i⁻¹
    return [GroupElementFinite(m, f"g{k}") for k, m in enumerate(generate_group([SQRT_I, SQRT_J]))]


def quaternion_group() -> list[GroupElementFinite]:
    return [GroupElementFinite(m, f"q{k}") for k, m in enumerate(generate_group([QI, QJ]))]


def is_special_unitary(M: RootTwoMatrix) -> bool:
    if M @ M.H != ONE:
        return False
    a = M.to_numpy()
    return abs(np.linalg.det(a) - 1) < 1e-12


def embed_per_factor(hs: list[RootTwoMatrix]) -> RootTwoMatrix:
    """(h_1, ..., h_n) acting on the planes span{e_j, f_j} of (ℝ²)ⁿ, e's first."""
    n = len(hs)
    A = Matrix.zeros(2 * n, 2 * n, "gaussian").a.copy()
    B = Matrix.zeros(2 * n, 2 * n, "gaussian").a.copy()
    for j, h in enumerate(hs):
        idx = [j, n + j]
        for r in range(2):
            for c in range(2):
                A[idx[r], idx[c]] = h.A.a[r, c]
                B[idx[r], idx[c]] = h.B.a[r, c]
    return RootTwoMatrix(Matrix._fast(A, "gaussian"), Matrix._fast(B, "gaussian"))


def cayley_transforms(n0: int, nplus: int, n: int) -> tuple[RootTwoMatrix, RootTwoMatrix, Matrix]:
    """(c_Γ, c_Σ, frame of c_Γ c_Σ² · span{e_j + i f_j}) with Γ the first n0
    indices and Σ the next nplus.
    """
    if n0 < 0 or nplus < 0 or n0 + nplus > n:
        raise InvariantError("need n0 + n+ <= n")
    ident = ONE
    cG = embed_per_factor([SQRT_I if j < n0 else ident for j in range(n)])
    cS = embed_per_factor([SQRT_I if n0 <= j < n0 + nplus else ident for j in range(n)])
    h = cG @ cS @ cS
    i = Gaussian(0, 1)
    base = vstack(Matrix.eye(n, "gaussian"), Matrix.eye(n, "gaussian") * i)
    frame = RootTwoMatrix.of(base)
    img = h @ frame
    cols = []
    for k in range(n):
        a, b = img.A.columns([k]), img.B.columns([k])
        # each column is a gaussian vector or √2 times one; the span ignores the scale
        if b.is_zero():
            cols.append(a)
        elif a.is_zero():
            cols.append(b)
        else:
            raise InvariantError("basepoint frame left the gaussian field")
    return cG, cS, hstack(*cols)


def cayley_basepoint(t: OrbitType):
    _, _, frame = cayley_transforms(t.n0, t.nplus, t.n)
    return make_lagrangian(frame, SymplecticSpace.standard(t.n))


def _real_proportional(v: np.ndarray, w: np.ndarray, tol: float = 1e-12) -> bool:
    k = int(np.argmax(np.abs(w)))
    if abs(w[k]) < tol:
        return False
    c = v[k] / w[k]
    return abs(c.imag) < tol and abs(c) > tol and np.linalg.norm(v - c * w) < tol * max(1.0, np.linalg.norm(v))


def cayley_line_orbit() -> list[np.ndarray]:
    """The real lines ℝe, ℝ(e - if), iℝf, ℝ(e + if), ℝe visited by √i."""
    lines = [np.array([1, 0], complex), np.array([1, -1j]), np.array([0, 1j]), np.array([1, 1j]), np.array([1, 0], complex)]
    S = SQRT_I.to_numpy()
    for a, b in zip(lines, lines[1:]):
        if not _real_proportional(S @ a, b):
            raise InvariantError("√i does not permute the four real lines")
    return lines


def sl2_triple() -> tuple[RootTwoMatrix, RootTwoMatrix, RootTwoMatrix]:
    """(e, h, f) = ((i𝐢 - 𝐣)/2, i𝐤, (i𝐢 + 𝐣)/2)."""
    i = Gaussian(0, 1)
    e = (QI.scale(i) + -QJ).scale(HALF)
    h = QK.scale(i)
    f = (QI.scale(i) + QJ).scale(HALF)
    return e, h, f


def adjoint(g: RootTwoMatrix, X: RootTwoMatrix) -> RootTwoMatrix:
    """g X g⁻¹ for unitary g."""
    return g @ X @ g.H


def rt_bracket(X: RootTwoMatrix, Y: RootTwoMatrix) -> RootTwoMatrix:
    return X @ Y + -(Y @ X)


# ---------------------------------------------------------------- Harish-Chandra coordinates


def _check_sym(M: np.ndarray, name: str, pol: TolerancePolicy):
    if M.ndim != 2 or M.shape[0] != M.shape[1] or np.linalg.norm(M - M.T) > pol.residual_tol * max(1.0, np.linalg.norm(M)):
        raise InvariantError(f"{name} must be a symmetric square matrix")


def harish_chandra(x, y, pol: TolerancePolicy | None = None) -> np.ndarray:
    """z = ½(1 - w)(1 + w)⁻¹ with w = y² + ix, the bounded-domain point of
    the coset of [[1, x], [0, 1]]·diag(y, y⁻¹).
    """
    pol = pol or default_policy()
    x = np.asarray(x.to_numpy() if isinstance(x, Matrix) else x, dtype=float)
    y = np.asarray(y.to_numpy() if isinstance(y, Matrix) else y, dtype=float)
    _check_sym(x, "x", pol)
    _check_sym(y, "y", pol)
    if np.linalg.eigvalsh(0.5 * (y + y.T))[0] <= 0:
        raise InvariantError("y must be positive definite")
    n = x.shape[0]
    w = y @ y + 1j * x
    one = np.eye(n)
    z = 0.5 * (one - w) @ np.linalg.inv(one + w)
    return 0.5 * (z + z.T)


def harish_chandra_frames(x, y, z) -> tuple[Matrix, Matrix]:
    """(g·[-i1; 1], P⁺(z)·[-i1; 1]) for g = [[1, x], [0, 1]]·diag(y, y⁻¹)."""
    x, y, z = (np.asarray(m.to_numpy() if isinstance(m, Matrix) else m) for m in (x, y, z))
    n = x.shape[0]
    one = np.eye(n)
    g = np.block([[one, x], [np.zeros((n, n)), one]]) @ np.block([[y, np.zeros((n, n))], [np.zeros((n, n)), np.linalg.inv(y)]])
    base = np.vstack([-1j * one, one])
    Pp = np.block([[one - z, 1j * z], [1j * z, one + z]])
    return Matrix.from_numpy(g @ base), Matrix.from_numpy(Pp @ base)


# ---------------------------------------------------------------- restricted subalgebras and eigen-splittings


def _span_basis(mats: list[Matrix]) -> list[Matrix]:
    if not mats:
        return []
    d = mats[0].rows
    A = hstack(*[_vec(M) for M in mats])
    C = column_basis(A)
    return [Matrix._fast(C.a[:, k].reshape(d, d).copy(), C.backend) for k in range(C.cols)]


def _embed_reduced(X: Matrix, n: int, n0: int) -> Matrix:
    m = n - n0
    out = Matrix.zeros(2 * n, 2 * n, X.backend).a.copy()
    idx = list(range(n0, n)) + list(range(n + n0, 2 * n))
    for r in range(2 * m):
        for c in range(2 * m):
            out[idx[r], idx[c]] = X.a[r, c]
    return Matrix._fast(out, X.backend)


def sigma_fourth_power(n: int, n0: int, nplus: int) -> Matrix:
    """c_Σ⁴ = diag(1_{n0}, -1_{n+}, 1_{n-}) on e's and f's."""
    d = [Fraction(-1) if n0 <= j < n0 + nplus else Fraction(1) for j in range(n)]
    D = Matrix.zeros(2 * n, 2 * n).a.copy()
    for j, v in enumerate(d + d):
        D[j, j] = v
    return Matrix._fast(D, "rational")


def _split_by(mats: list[Matrix], D: Matrix, sign: int) -> list[Matrix]:
    out = [(M + (D @ M @ D) * sign) * HALF for M in mats]
    return _span_basis([M for M in out if not M.is_zero()])


def restricted_subalgebra(n: int, n0: int, nplus: int) -> dict[str, list[Matrix]]:
    """Bases of g_{Ψ∖Γ}, k^Σ, p^Σ, q, r (exact)."""
    if n0 < 0 or nplus < 0 or n0 + nplus > n:
        raise InvariantError("need n0 + n+ <= n")
    m = n - n0
    if m == 0:
        return {"g": [], "k": [], "p": [], "q": [], "r": []}
    ctx = cartan_context(m)
    g = [_embed_reduced(X, n, n0) for X in ctx.basis_g]
    k = [_embed_reduced(X, n, n0) for X in ctx.basis_k]
    p = [_embed_reduced(X, n, n0) for X in ctx.basis_p]
    D = sigma_fourth_power(n, n0, nplus)
    return {
        "g": g,
        "k": _split_by(k, D, 1),
        "p": _split_by(p, D, 1),
        "q": _split_by(k, D, -1),
        "r": _split_by(p, D, -1),
    }


def involution_splitting(nplus: int, nminus: int) -> dict[str, list[Matrix]]:
    """Bases of k∥, k×, p∥, p× for Ĩ = diag(1, -1, 1, -1) and the standard J (exact)."""
    m = nplus + nminus
    ctx = cartan_context(m)
    d = [Fraction(1)] * nplus + [Fraction(-1)] * nminus
    I = Matrix.zeros(2 * m, 2 * m).a.copy()
    for j, v in enumerate(d + d):
        I[j, j] = v
    I = Matrix._fast(I, "rational")
    return {
        "k_par": _split_by(ctx.basis_k, I, 1),
        "k_perp": _split_by(ctx.basis_k, I, -1),
        "p_par": _split_by(ctx.basis_p, I, 1),
        "p_perp": _split_by(ctx.basis_p, I, -1),
    }


def in_span(X: Matrix, basis: list[Matrix]) -> bool:
    if X.is_zero():
        return True
    if not basis:
        return False
    A = hstack(*[_vec(B.to(X.backend) if B.backend != X.backend else B) for B in basis])
    return rank(hstack(A, _vec(X))) == rank(A)
