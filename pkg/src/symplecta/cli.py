"""Command-line front end.

Exit codes: 0 ok, 2 parse error, 3 invariant violation, 4 numerical
non-convergence. SYMPLECTA_TOL overrides the residual tolerance.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable

import numpy as np

from . import jsonio
from .darboux import darboux_extend
from .errors import ConvergenceError, InvariantError, ParseError, SymplectaError
from .heisenberg import FORMS, heisenberg_dim, heisenberg_inverse, heisenberg_to_matrix, ziegler_convert
from .lagrangian import ComplexLagrangian, SplitLagrangian, kappa_gram, lag_type, make_lagrangian, make_split, split_type
from .lie import cayley_transforms, root_data
from .numeric import Matrix, TolerancePolicy, signature_by_congruence
from .orbits import KINDS, incidence, orbit_dim, orbit_dim_by_stabilizer
from .retractions import retract
from .space import (
    OrbitType,
    Subspace,
    SymplecticSpace,
    check_compatible_J,
    radical,
    reduce_at,
    subspace_type,
    symplectic_complement,
)

EXIT_OK, EXIT_PARSE, EXIT_INVARIANT, EXIT_CONVERGENCE = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _read_input(path: str | None) -> Any:
    if path in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    return jsonio.loads(text)


def _emit(doc) -> None:
    sys.stdout.write(jsonio.dumps(doc) + "\n")


def _note(line: str) -> None:
    sys.stderr.write(line + "\n")


def _to_float(M: Matrix) -> Matrix:
    return M.to("complex" if M.is_complex else "float") if M.is_exact else M


def _with_backend(x, backend: str):
    if backend != "float":
        return x
    if isinstance(x, Subspace):
        return Subspace(SymplecticSpace(x.space.n, x.space.form("float")), _to_float(x.basis))
    if isinstance(x, ComplexLagrangian):
        return make_lagrangian(_to_float(x.frame), SymplecticSpace(x.n, x.space.form("float")))
    if isinstance(x, SplitLagrangian):
        return make_split(SymplecticSpace(x.n, x.space.form("float")), _to_float(x.geq0), _to_float(x.leq0))
    return x


def _type_arg(values: list[int]) -> OrbitType:
    return jsonio.type_from_json(list(values))


# ---------------------------------------------------------------- classify


def classify_document(doc, backend: str = "rational", explain: bool = False) -> dict:
    """Orbit type of one decoded document, with optional dimension details."""
    x = _with_backend(jsonio.decode_object(doc), backend)
    if isinstance(x, Subspace):
        t = subspace_type(x)
        out: dict[str, Any] = {"kind": "subspace", "type": jsonio.type_to_json(t)}
        if explain:
            out["explain"] = {
                "dim": x.dim,
                "dim_radical": radical(x).dim,
                "dim_complement": symplectic_complement(x).dim,
                "rank_form": x.dim - t.n0,
            }
        return out
    if isinstance(x, ComplexLagrangian):
        t = lag_type(x)
        out = {"kind": "lagrangian", "type": jsonio.type_to_json(t)}
        if explain:
            out["explain"] = {"kappa_inertia": list(signature_by_congruence(kappa_gram(x.space, x.frame))), "dim_kernel": t.n0}
        return out
    if isinstance(x, SplitLagrangian):
        t = split_type(x)
        out = {"kind": "split", "type": jsonio.type_to_json(t)}
        if explain:
            out["explain"] = {"dim_geq0": x.geq0.cols, "dim_leq0": x.leq0.cols}
        return out
    raise ParseError(f"classify needs a subspace or a Lagrangian, got {type(x).__name__}")


def _classify_job(args: tuple) -> tuple[int, dict | None, tuple[int, str] | None]:
    doc, backend, explain = args
    try:
        return 0, classify_document(doc, backend, explain), None
    except ParseError as exc:
        return 1, None, (EXIT_PARSE, str(exc))
    except InvariantError as exc:
        return 1, None, (EXIT_INVARIANT, str(exc))


def _human(res: dict) -> str:
    t = res["type"]
    return f"{res['kind']}: n0={t[0]} n+={t[1]} n-={t[2]}"


def cmd_classify(ns) -> int:
    doc = _read_input(ns.input)
    batch = doc if isinstance(doc, list) else [doc]
    jobs = [(d, ns.backend, ns.explain) for d in batch]
    if ns.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=ns.jobs) as pool:
            results = list(pool.map(_classify_job, jobs))
    else:
        results = [_classify_job(j) for j in jobs]
    for _, res, err in results:
        if err is not None:
            code, msg = err
            _note(f"error: {msg}")
            return code
        _emit(res if ns.explain else res["type"])
        _note(_human(res))
    return EXIT_OK


# ---------------------------------------------------------------- subspace commands


def _subspace_input(ns) -> Subspace:
    x = _with_backend(jsonio.decode_object(_read_input(ns.input)), ns.backend)
    if not isinstance(x, Subspace):
        raise ParseError("expected a subspace document with a 'basis' field")
    return x


def cmd_complement(ns) -> int:
    W = _subspace_input(ns)
    Wc = symplectic_complement(W)
    _emit(jsonio.subspace_to_json(Wc))
    if ns.explain:
        _note(f"dim W = {W.dim}, dim W^ω = {Wc.dim}")
    return EXIT_OK


def cmd_darboux(ns) -> int:
    W = _subspace_input(ns)
    B = darboux_extend(W)
    _emit(jsonio.darboux_to_json(B))
    if ns.explain:
        _note("columns: e0 e+ e- f0 f+ f- with (n0, n+, n-) = " + str(tuple(B.labels)))
    return EXIT_OK


def cmd_reduce(ns) -> int:
    doc = _read_input(ns.input)
    if isinstance(doc, dict) and "W0" in doc:
        W0 = _with_backend(jsonio.subspace_from_json(doc["W0"]), ns.backend)
        W = _with_backend(jsonio.subspace_from_json(doc["W"]), ns.backend) if "W" in doc else None
    else:
        W = _with_backend(jsonio.decode_object(doc), ns.backend)
        if not isinstance(W, Subspace):
            raise ParseError("reduce needs a subspace or an object with 'W0' (and optionally 'W')")
        W0 = radical(W)
    R = reduce_at(W0)
    out: dict[str, Any] = {"m": R.m, "complement_basis": jsonio.matrix_to_json(R.complement_basis)}
    if R.m:
        out["omega"] = jsonio.matrix_to_json(R.omega_tilde)
    if W is not None:
        if R.m:
            image = R.reduced_subspace(W)
            out["image"] = jsonio.subspace_to_json(image)
            out["image_type"] = jsonio.type_to_json(subspace_type(image))
        else:
            out["image"] = None
    _emit(out)
    if ns.explain:
        _note(f"reduced at a {W0.dim}-dimensional isotropic subspace; reduced dimension 2·{R.m}")
    return EXIT_OK


# ---------------------------------------------------------------- retractions


def cmd_retract(ns) -> int:
    x = _with_backend(jsonio.decode_object(_read_input(ns.input)), ns.backend)
    J = None
    if ns.J is not None:
        Jm = jsonio.matrix_from_json(_read_input(ns.J))
        J = check_compatible_J(Jm, x.space)
    rep = retract(ns.map, x, J)
    _emit({"output": jsonio.encode_object(rep.output), "residual": rep.residual, "membership": "pass" if rep.membership else "fail"})
    if ns.explain:
        _note(f"{ns.map}: residual {rep.residual:.3e}, membership {'pass' if rep.membership else 'fail'}")
    return EXIT_OK if rep.membership else EXIT_INVARIANT


# ---------------------------------------------------------------- orbits


def cmd_orbit_dim(ns) -> int:
    t = _type_arg(ns.type)
    d = orbit_dim(ns.kind, t)
    out: dict[str, Any] = {"kind": ns.kind, "type": jsonio.type_to_json(t), "dim": d}
    if ns.explain:
        out["stabilizer_check"] = orbit_dim_by_stabilizer(ns.kind, t)
    _emit(out)
    return EXIT_OK


def cmd_incidence(ns) -> int:
    t, t2 = _type_arg(ns.source), _type_arg(ns.target)
    _emit({"kind": ns.kind, "from": jsonio.type_to_json(t), "to": jsonio.type_to_json(t2), "in_closure": incidence(ns.kind, t, t2)})
    return EXIT_OK


# ---------------------------------------------------------------- ℝ² demo


def sphere_samples(samples: int, seed: int) -> np.ndarray:
    """Points [q : p] uniform on ℙ¹ for the Fubini-Study measure."""
    if samples <= 0:
        raise InvariantError("samples must be positive")
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(samples, 2)) + 1j * rng.normal(size=(samples, 2))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def equator_samples(count: int) -> np.ndarray:
    """Real points [cos θ : sin θ] spread over the equator ℙ¹(ℝ)."""
    if count <= 0:
        raise InvariantError("equator sweep needs a positive count")
    theta = np.pi * np.arange(count) / count
    return np.stack([np.cos(theta), np.sin(theta)], axis=1).astype(complex)


def sphere_rows(points: np.ndarray) -> list[tuple]:
    V = SymplecticSpace.standard(1, "float")
    rows = []
    for q, p in points:
        t = lag_type(make_lagrangian(Matrix.from_numpy(np.array([[q], [p]])), V))
        rows.append((q.real, q.imag, p.real, p.imag, f"({t.n0},{t.nplus},{t.nminus})"))
    return rows


def cmd_sphere_demo(ns) -> int:
    if ns.equator_sweep is not None:
        points = equator_samples(ns.equator_sweep)
    else:
        points = sphere_samples(ns.samples, ns.seed)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["q_re", "q_im", "p_re", "p_im", "type"])
    for row in sphere_rows(points):
        w.writerow([repr(float(v)) for v in row[:4]] + [row[4]])
    return EXIT_OK


# ---------------------------------------------------------------- Lie structure


def cmd_roots(ns) -> int:
    d = root_data(ns.cartan, ns.n)
    _emit(jsonio.root_datum_to_json(d))
    if ns.explain:
        _note(f"{len(d.roots)} roots, {sum(r.positive for r in d.roots)} positive")
    return EXIT_OK


def cmd_cayley(ns) -> int:
    n = ns.n if ns.n is not None else ns.gamma + ns.sigma
    cG, cS, frame = cayley_transforms(ns.gamma, ns.sigma, n)
    F = make_lagrangian(frame, SymplecticSpace.standard(n))
    _emit({
        "c_gamma": jsonio.root_two_to_json(cG),
        "c_sigma": jsonio.root_two_to_json(cS),
        "basepoint": jsonio.lagrangian_to_json(F),
        "type": jsonio.type_to_json(lag_type(F)),
    })
    return EXIT_OK


def cmd_heisenberg(ns) -> int:
    if ns.op == "dim":
        if ns.type is None:
            raise ParseError("heisenberg dim needs --type N0 NPLUS NMINUS")
        t = _type_arg(ns.type)
        _emit({"type": jsonio.type_to_json(t), "dim": heisenberg_dim(t)})
        return EXIT_OK
    h = jsonio.decode_object(_read_input(ns.input))
    if not hasattr(h, "Y"):
        raise ParseError("expected a Heisenberg element document")
    if ns.op == "matrix":
        _emit(jsonio.matrix_to_json(heisenberg_to_matrix(h, ns.form)))
    elif ns.op == "inverse":
        _emit(jsonio.heisenberg_to_json(heisenberg_inverse(h)))
    else:
        lam, mu, x = ziegler_convert(h)
        _emit({"lambda": jsonio.matrix_to_json(lam), "mu": jsonio.matrix_to_json(mu), "x": jsonio.matrix_to_json(x)})
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--backend", choices=("rational", "float"), default="rational")
    common.add_argument("--explain", action="store_true", help="print extra diagnostics")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for batch input")

    p = _Parser(prog="symplecta", description="Orbit types, Darboux bases, reductions and retractions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, fn: Callable, help_: str, with_input: bool = True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if with_input:
            sp.add_argument("input", nargs="?", default=None, help="JSON file; stdin when omitted or '-'")
        sp.set_defaults(func=fn)
        return sp

    add("classify", cmd_classify, "orbit type of subspaces or Lagrangians (a JSON list is a batch)")
    add("complement", cmd_complement, "symplectic complement of a subspace")
    add("darboux", cmd_darboux, "Darboux basis adapted to a subspace")
    add("reduce", cmd_reduce, "linear symplectic reduction at an isotropic subspace")
    sp = add("retract", cmd_retract, "apply gamma, beta or eta")
    sp.add_argument("--map", choices=("gamma", "beta", "eta"), required=True)
    sp.add_argument("--J", default=None, help="JSON matrix file with a compatible complex structure")
    sp = add("orbit-dim", cmd_orbit_dim, "dimension of an orbit", with_input=False)
    sp.add_argument("--kind", choices=KINDS, required=True)
    sp.add_argument("--type", type=int, nargs=3, required=True, metavar=("N0", "NPLUS", "NMINUS"))
    sp = add("incidence", cmd_incidence, "closure relation between two orbits", with_input=False)
    sp.add_argument("--kind", choices=KINDS, required=True)
    sp.add_argument("--from", dest="source", type=int, nargs=3, required=True, metavar=("N0", "NPLUS", "NMINUS"))
    sp.add_argument("--to", dest="target", type=int, nargs=3, required=True, metavar=("N0", "NPLUS", "NMINUS"))
    sp = add("sphere-demo", cmd_sphere_demo, "CSV of classified points of Lag(ℂ²)", with_input=False)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--equator-sweep", type=int, default=None, metavar="N")
    sp = add("roots", cmd_roots, "root data of sp(2n) for a Cartan subalgebra", with_input=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--cartan", choices=("a", "h", "t"), default="t")
    sp = add("cayley", cmd_cayley, "partial Cayley transforms and their basepoint", with_input=False)
    sp.add_argument("--gamma", type=int, required=True)
    sp.add_argument("--sigma", type=int, required=True)
    sp.add_argument("--n", type=int, default=None)
    sp = add("heisenberg", cmd_heisenberg, "Heisenberg group utilities")
    sp.add_argument("--op", choices=("dim", "matrix", "inverse", "ziegler"), default="matrix")
    sp.add_argument("--form", choices=FORMS, default="darboux")
    sp.add_argument("--type", type=int, nargs=3, default=None, metavar=("N0", "NPLUS", "NMINUS"))
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        try:
            TolerancePolicy.from_env()
        except InvariantError as exc:
            raise ParseError(str(exc)) from exc
        ns = build_parser().parse_args(argv)
        if ns.jobs < 1:
            raise ParseError("--jobs must be positive")
        if getattr(ns, "samples", 1) <= 0 and getattr(ns, "equator_sweep", None) is None:
            raise ParseError("--samples must be positive")
        return ns.func(ns)
    except ParseError as exc:
        _note(f"parse error: {exc}")
        return EXIT_PARSE
    except ConvergenceError as exc:
        _note(f"not converged: {exc}")
        return EXIT_CONVERGENCE
    except InvariantError as exc:
        _note(f"invariant violated: {exc}")
        return EXIT_INVARIANT
    except SymplectaError as exc:
        _note(f"error: {exc}")
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
