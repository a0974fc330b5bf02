"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line
that is printed in the pytest terminal summary.
"""

from __future__ import annotations

import time
from fractions import Fraction

import numpy as np
import pytest

from helpers import (
    ACCEPTANCE,
    act,
    check_adapted,
    exact_symplectic,
    float_lagrangian,
    float_split,
    float_subspace,
    float_symplectic,
    float_unitary,
    gram_rank_type,
    random_heisenberg,
    random_levi,
    random_subspace,
)
from symplecta.cli import sphere_rows, sphere_samples
from symplecta.darboux import darboux_extend
from symplecta.errors import ConvergenceError, InvariantError
from symplecta.heisenberg import (
    HeisenbergElement,
    factor_stabilizer,
    heisenberg_dim,
    heisenberg_to_matrix,
    levi_embed,
    ziegler_convert,
    ziegler_unconvert,
)
from symplecta.lagrangian import basepoint, lag_type, mobius_act
from symplecta.lie import (
    ONE,
    QI,
    QJ,
    QK,
    SIGMA1,
    SIGMA2,
    SIGMA3,
    SQRT_I,
    SQRT_J,
    SQRT_K,
    ad_matrix,
    adjoint,
    bracket,
    cayley_transforms,
    generate_group,
    harish_chandra,
    harish_chandra_frames,
    in_span,
    involution_splitting,
    killing_form,
    quaternion_group,
    root_data,
    sp_standard_basis,
)
from symplecta.numeric import Matrix, canonical_span, inverse, projector_distance, rationalize
from symplecta.orbits import (
    KINDS,
    complex_symplectic_path,
    degeneration_path,
    frame_distance,
    incidence,
    orbit_dim,
    orbit_dim_by_stabilizer,
    standard_subspace,
)
from symplecta.retractions import (
    beta_J,
    chi_correction,
    compatible_involution,
    forget,
    gamma_J,
    iota_J,
    mostow_decompose,
    psi_J,
    radical_maps,
    real_nonnegative_part,
)
from symplecta.space import OrbitType, Subspace, all_types, subspace_type


@pytest.fixture
def record(request):
    """record(num, ok, detail) stores the criterion line; a test that raises first is recorded as FAIL."""
    lines = request.config.stash[ACCEPTANCE]
    seen: list[int] = []

    def _record(num: int, ok: bool, detail: str) -> bool:
        line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines[num] = line
        seen.append(num)
        print(line)
        return ok

    yield _record
    num = getattr(request.function, "criterion", None)
    if num is not None and num not in seen:
        lines[num] = f"criterion {num:2d}: FAIL  raised before completion"


def criterion(num: int):
    def wrap(fn):
        fn.criterion = num
        return fn

    return wrap


def _dist(a, b) -> float:
    if isinstance(a, Subspace):
        return projector_distance(a.basis, b.basis)
    if hasattr(a, "frame"):
        return projector_distance(a.frame, b.frame)
    return max(projector_distance(a.geq0, b.geq0), projector_distance(a.leq0, b.leq0))


def _combo(rng: np.random.Generator, basis: list[Matrix]) -> Matrix:
    out = Matrix.zeros(basis[0].rows, basis[0].cols)
    for B in basis:
        out = out + B * Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
    return out


# ---------------------------------------------------------------- 1


@criterion(1)
def test_c01_type_classification_matches_gram_rank(record):
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    mismatches = 0
    for n in (1, 2, 3, 4):
        for _ in range(500):
            W = random_subspace(rng, n, int(rng.integers(0, 2 * n + 1)))
            mismatches += subspace_type(W) != gram_rank_type(W)
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 10
    assert record(1, ok, f"2000 subspaces, {mismatches} mismatches, {elapsed:.1f}s")


# ---------------------------------------------------------------- 2


@criterion(2)
def test_c02_orbit_dimensions_match_stabilizers(record):
    checked, bad = 0, []
    for n in (1, 2, 3):
        for t in all_types(n):
            for kind in KINDS:
                checked += 1
                if orbit_dim(kind, t) != orbit_dim_by_stabilizer(kind, t):
                    bad.append((kind, tuple(t)))
    assert record(2, not bad, f"{checked} (kind, type) pairs, mismatches {bad}")


# ---------------------------------------------------------------- 3


@criterion(3)
def test_c03_darboux_postconditions(record):
    rng = np.random.default_rng(1003)
    failures = 0
    for n in (1, 2, 3, 4):
        for _ in range(200):
            W = random_subspace(rng, n, int(rng.integers(0, 2 * n + 1)))
            B = darboux_extend(W)
            try:
                assert B.labels == subspace_type(W)
                check_adapted(W, B)
            except AssertionError:
                failures += 1
    assert record(3, failures == 0, f"800 exact subspaces, {failures} failures")


# ---------------------------------------------------------------- 4


def _lag_types(n: int) -> list[OrbitType]:
    return [t for t in all_types(n) if t.n == n]


@criterion(4)
def test_c04_incidence(record):
    rng = np.random.default_rng(1004)
    types = _lag_types(2)
    allowed_bad = 0
    allowed = 0
    for t in types:
        for t2 in types:
            if not incidence("Lag", t, t2):
                with pytest.raises(InvariantError):
                    degeneration_path(basepoint(t2), t, 1e-3)
                continue
            allowed += 1
            target = float_lagrangian(rng, t2, scale=0.3)
            for eps in (1e-1, 1e-3, 1e-6):
                allowed_bad += lag_type(degeneration_path(target, t, eps)) != t
    violations = 0
    paths = 0
    for t2 in types:
        forbidden = {t for t in types if not incidence("Lag", t, t2)}
        if not forbidden:
            continue
        for _ in range(100):
            F = float_lagrangian(rng, t2, scale=0.3)
            D = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            paths += 1
            s = 1e-7
            while True:
                Fs = complex_symplectic_path(F, D, s)
                if frame_distance(Fs, F) < 1e-6:
                    break
                s /= 2
            violations += lag_type(Fs) in forbidden
    ok = allowed_bad == 0 and violations == 0
    assert record(4, ok, f"{allowed} allowed pairs x 3 eps, {allowed_bad} wrong types; {paths} paths, {violations} violations")


# ---------------------------------------------------------------- 5


@criterion(5)
def test_c05_retraction_contract(record):
    rng = np.random.default_rng(1005)
    t = OrbitType(0, 1, 1)
    idem = equi = 0.0
    for _ in range(100):
        F = float_lagrangian(rng, t)
        W = float_subspace(rng, t)
        B, G = beta_J(F), gamma_J(W)
        idem = max(idem, _dist(beta_J(B), B), _dist(gamma_J(G), G))
        k = float_unitary(rng, 2)
        equi = max(equi, _dist(beta_J(act(k, F)), act(k, B)), _dist(gamma_J(act(k, W)), act(k, G)))
    fiber_bad = 0
    for _ in range(20):
        g = exact_symplectic(rng, 2)
        W = standard_subspace(t).image(g)
        fiber_bad += rationalize(canonical_span(radical_maps(gamma_J(W)).basis)) != canonical_span(radical_maps(W).basis)
        Fx = mobius_act(g, basepoint(t))
        fiber_bad += rationalize(canonical_span(radical_maps(beta_J(Fx)).basis)) != canonical_span(radical_maps(Fx).basis)
    triple = compatible_involution(standard_subspace(t))
    converged, worst, samples = 0, 0.0, 200
    for j in range(samples):
        g = float_symplectic(rng, 2, scale=1.0)
        try:
            f = mostow_decompose(Matrix.from_numpy(g), triple, "par_perp" if j % 2 else "perp_par")
        except ConvergenceError:
            continue
        converged += 1
        worst = max(worst, f.residual)
    rate = converged / samples
    ok = idem < 1e-8 and equi < 1e-8 and fiber_bad == 0 and worst < 1e-10 and rate >= 0.99
    detail = (
        f"idempotence {idem:.1e}, equivariance {equi:.1e} (100 pairs), fiber mismatches {fiber_bad}, "
        f"Mostow {converged}/{samples} converged, worst residual {worst:.1e}"
    )
    assert record(5, ok, detail)


# ---------------------------------------------------------------- 6


@criterion(6)
def test_c06_pullback_square(record):
    rng = np.random.default_rng(1006)
    types = _lag_types(2)
    worst = 0.0
    for j in range(50):
        S = float_split(rng, types[j % len(types)])
        top = psi_J(gamma_J(real_nonnegative_part(chi_correction(S))))
        bottom = iota_J(beta_J(forget(S)))
        worst = max(worst, _dist(top, bottom))
    assert record(6, worst < 1e-8, f"50 split Lagrangians over all n=2 types, max route distance {worst:.1e}")


# ---------------------------------------------------------------- 7


CLOSURES = [
    ("k_par", "k_par", "k_par"),
    ("k_perp", "k_perp", "k_par"),
    ("p_par", "p_par", "k_par"),
    ("p_perp", "p_perp", "k_par"),
    ("k_par", "k_perp", "k_perp"),
    ("k_par", "p_par", "p_par"),
    ("k_par", "p_perp", "p_perp"),
]


@criterion(7)
def test_c07_lie_structure(record):
    root_bad = roots = 0
    for which in ("a", "h", "t"):
        for n in (1, 2, 3):
            d = root_data(which, n)
            assert len(d.roots) == 2 * n * n
            for r in d.roots:
                roots += 1
                root_bad += bracket(r.vector, d.negative(r).vector) != r.coroot
    killing_bad = pairs = 0
    for n in (1, 2, 3):
        basis = sp_standard_basis(n)
        # the ad matrices of the integral basis are integral
        ads = [np.array(ad_matrix(X).a, dtype=np.int64) for X in basis]
        for X, A in zip(basis, ads):
            for Y, B in zip(basis, ads):
                pairs += 1
                killing_bad += killing_form(X, Y) != int(np.trace(A @ B))
    rng = np.random.default_rng(1007)
    shapes = [(1, 1), (2, 1), (1, 2)]
    splittings = {s: involution_splitting(*s) for s in shapes}
    closure_bad = 0
    for a, b, c in CLOSURES:
        for j in range(100):
            pieces = splittings[shapes[j % 3]]
            closure_bad += not in_span(bracket(_combo(rng, pieces[a]), _combo(rng, pieces[b])), pieces[c])
    ok = root_bad == killing_bad == closure_bad == 0
    detail = (
        f"{roots} roots ({root_bad} bad), {pairs} Killing pairs ({killing_bad} bad), "
        f"7 inclusions x 100 samples ({closure_bad} bad)"
    )
    assert record(7, ok, detail)


# ---------------------------------------------------------------- 8


def _finite_group_facts() -> dict:
    cG, _, _ = cayley_transforms(1, 0, 1)
    s = 1 / np.sqrt(2)
    return {
        "literal": len(generate_group([SQRT_I, QJ])),
        "octahedral": len(generate_group([SQRT_I, SQRT_J])),
        "q8": len(quaternion_group()),
        "relations": QI @ QJ == QK and QJ @ QK == QI and QK @ QI == QJ and all(q @ q == -ONE for q in (QI, QJ, QK)),
        "conjugations": adjoint(SQRT_I, SIGMA2) == SIGMA3 and adjoint(SQRT_J, SIGMA3) == SIGMA1 and adjoint(SQRT_K, SIGMA1) == SIGMA2,
        "cayley": cG == SQRT_I and np.allclose(cG.to_numpy(), s * np.array([[1, -1j], [-1j, 1]]), atol=0),
    }


def test_c08_finite_groups_except_generated_order():
    f = _finite_group_facts()
    assert f["octahedral"] == 48 and f["q8"] == 8
    assert f["relations"] and f["conjugations"] and f["cayley"]


@criterion(8)
@pytest.mark.xfail(strict=True, reason="<sqrt(i), j> has order 16; the order-48 group is <sqrt(i), sqrt(j)>")
def test_c08_finite_groups(record):
    f = _finite_group_facts()
    rest = f["q8"] == 8 and f["relations"] and f["conjugations"] and f["cayley"]
    ok = f["literal"] == 48 and rest
    detail = (
        f"|<sqrt(i), j>| = {f['literal']} (required 48); |<sqrt(i), sqrt(j)>| = {f['octahedral']}; "
        f"|Q8| = {f['q8']}; relations, conjugations and c_Gamma {'hold' if rest else 'FAIL'}"
    )
    assert record(8, ok, detail)


# ---------------------------------------------------------------- 9


@criterion(9)
def test_c09_harish_chandra(record):
    rng = np.random.default_rng(1009)
    bounded_bad = span_worst = 0.0
    for j in range(200):
        n = 1 + j % 3
        x = rng.normal(size=(n, n))
        x = x + x.T
        a = rng.normal(size=(n, n))
        y = a @ a.T + 0.1 * np.eye(n)
        z = harish_chandra(x, y)
        bounded_bad += np.linalg.eigvalsh(4 * np.eye(n) - z @ z.conj().T)[0] <= 0
        F1, F2 = harish_chandra_frames(x, y, z)
        span_worst = max(span_worst, projector_distance(F1, F2))
    origin = float(np.abs(harish_chandra(np.zeros((2, 2)), np.eye(2))).max())
    ok = bounded_bad == 0 and span_worst < 1e-9 and origin == 0.0
    assert record(9, ok, f"200 samples: {int(bounded_bad)} unbounded, max frame distance {span_worst:.1e}; |z(0,1)| = {origin}")


# ---------------------------------------------------------------- 10


@criterion(10)
def test_c10_sphere_demo(record):
    rows = sphere_rows(sphere_samples(1000, 0))
    upper = sum(r[4] == "(0,1,0)" for r in rows)
    lower = sum(r[4] == "(0,0,1)" for r in rows)
    equator = sum(r[4] == "(1,0,0)" for r in rows)
    sign_bad = 0
    for q_re, q_im, p_re, p_im, label in rows:
        kappa = 2 * (complex(q_re, q_im) * complex(p_re, p_im).conjugate()).imag
        sign_bad += label != ("(0,1,0)" if kappa > 0 else "(0,0,1)")
    ok = abs(upper - 500) <= 50 and abs(lower - 500) <= 50 and equator == 0 and sign_bad == 0
    assert record(10, ok, f"1000 samples: upper {upper}, lower {lower}, equator {equator}, sign mismatches {sign_bad}")


# ---------------------------------------------------------------- 11


def _tangent_rank(t: OrbitType) -> int:
    """Rank of the span of the linear parts of one-parameter Heisenberg elements."""
    n0, p, m = t
    if n0 == 0:
        return 0
    Z = lambda r, c: Matrix.zeros(r, c)  # noqa: E731

    def unit(r, c, i, j):
        M = Matrix.zeros(r, c).a.copy()
        M[i, j] = Fraction(1)
        return Matrix._fast(M, "rational")

    params = []
    for i in range(n0):
        params += [(unit(n0, p, i, j), Z(n0, m), Z(n0, p), Z(n0, m), Z(n0, n0)) for j in range(p)]
        params += [(Z(n0, p), unit(n0, m, i, j), Z(n0, p), Z(n0, m), Z(n0, n0)) for j in range(m)]
        params += [(Z(n0, p), Z(n0, m), unit(n0, p, i, j), Z(n0, m), Z(n0, n0)) for j in range(p)]
        params += [(Z(n0, p), Z(n0, m), Z(n0, p), unit(n0, m, i, j), Z(n0, n0)) for j in range(m)]
        for j in range(i, n0):
            S = unit(n0, n0, i, j)
            params.append((Z(n0, p), Z(n0, m), Z(n0, p), Z(n0, m), S + S.T if i != j else S))
    # with a single nonzero parameter every entry is at most quadratic, so the odd part is linear
    vecs = []
    for blocks in params:
        plus = heisenberg_to_matrix(HeisenbergElement(t, *blocks)).to("float").to_numpy()
        minus = heisenberg_to_matrix(HeisenbergElement(t, *(-b for b in blocks))).to("float").to_numpy()
        vecs.append(((plus - minus) / 2).ravel())
    return int(np.linalg.matrix_rank(np.array(vecs)))


@criterion(11)
def test_c11_heisenberg(record):
    dim_bad = []
    ntypes = 0
    for n in range(1, 6):
        for t in all_types(n):
            ntypes += 1
            if heisenberg_dim(t) != _tangent_rank(t):
                dim_bad.append(tuple(t))
    rng = np.random.default_rng(1011)
    types = [t for n in (1, 2, 3) for t in all_types(n) if t.n0]
    factor_bad = 0
    for j in range(200):
        t = types[j % len(types)]
        Wg = standard_subspace(t).image(exact_symplectic(rng, t.n))
        D = darboux_extend(Wg)
        L, H = random_levi(rng, t), random_heisenberg(rng, t)
        g = D.vectors @ levi_embed(L) @ heisenberg_to_matrix(H) @ inverse(D.vectors)
        L2, H2 = factor_stabilizer(g, D)
        factor_bad += not (L2.X == L.X and L2.gplus == L.gplus and L2.gminus == L.gminus and H2 == H)
    ziegler_bad = 0
    for j in range(200):
        t = types[j % len(types)]
        h = random_heisenberg(rng, t)
        ziegler_bad += ziegler_unconvert(*ziegler_convert(h), t) != h
    ok = not dim_bad and factor_bad == 0 and ziegler_bad == 0
    detail = f"{ntypes} types n<=5 (dimension mismatches {dim_bad}); factor_stabilizer {factor_bad}/200 bad; Ziegler {ziegler_bad}/200 bad"
    assert record(11, ok, detail)
