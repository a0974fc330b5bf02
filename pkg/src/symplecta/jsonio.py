"""JSON encoding of matrices, subspaces, Lagrangians, Darboux bases, Heisenberg
elements and root data.

Matrices: {"rows", "cols", "backend", "data"} row-major; rationals are "p/q"
strings, complex entries are [re, im] pairs.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .darboux import DarbouxBasis
from .errors import InvariantError, ParseError
from .heisenberg import HeisenbergElement
from .lagrangian import ComplexLagrangian, SplitLagrangian, make_lagrangian, make_split
from .lie import RootDatum, RootTwoMatrix
from .numeric import BACKENDS, Gaussian, Matrix
from .space import OrbitType, Subspace, SymplecticSpace


def _rat_out(x: Fraction) -> str:
    return str(x)


def _rat_in(x) -> Fraction:
    if isinstance(x, bool):
        raise ParseError(f"not a rational entry: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational entry: {x!r}") from exc
    raise ParseError(f"exact entries must be integers or 'p/q' strings, got {x!r}")


def _float_in(x) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float, str)):
        raise ParseError(f"not a real entry: {x!r}")
    try:
        return float(x)
    except ValueError as exc:
        raise ParseError(f"not a real entry: {x!r}") from exc


def _pair(x) -> tuple:
    if not isinstance(x, (list, tuple)) or len(x) != 2:
        raise ParseError(f"complex entries must be [re, im] pairs, got {x!r}")
    return x[0], x[1]


def encode_scalar(x, backend: str):
    if backend == "rational":
        return _rat_out(Fraction(x))
    if backend == "gaussian":
        g = x if isinstance(x, Gaussian) else Gaussian(x)
        return [_rat_out(g.re), _rat_out(g.im)]
    if backend == "float":
        return float(x)
    c = complex(x)
    return [c.real, c.imag]


def decode_scalar(x, backend: str):
    if backend == "rational":
        return _rat_in(x)
    if backend == "gaussian":
        re, im = _pair(x)
        return Gaussian(_rat_in(re), _rat_in(im))
    if backend == "float":
        return _float_in(x)
    re, im = _pair(x)
    return complex(_float_in(re), _float_in(im))


def matrix_to_json(M: Matrix) -> dict:
    return {
        "rows": M.rows,
        "cols": M.cols,
        "backend": M.backend,
        "data": [[encode_scalar(x, M.backend) for x in row] for row in M.a.tolist()],
    }


def _require(doc, key: str, kind: type | tuple = object):
    if not isinstance(doc, dict):
        raise ParseError(f"expected a JSON object, got {type(doc).__name__}")
    if key not in doc:
        raise ParseError(f"missing field {key!r}")
    val = doc[key]
    if not isinstance(val, kind) or isinstance(val, bool) and kind is int:
        raise ParseError(f"field {key!r} has the wrong type")
    return val


def matrix_from_json(doc) -> Matrix:
    rows = _require(doc, "rows", int)
    cols = _require(doc, "cols", int)
    backend = doc.get("backend", "rational")
    if backend not in BACKENDS:
        raise ParseError(f"unknown backend {backend!r}")
    data = _require(doc, "data", list)
    if rows < 0 or cols < 0 or len(data) != rows or any(not isinstance(r, list) or len(r) != cols for r in data):
        raise ParseError(f"data does not match the declared shape {rows}×{cols}")
    if rows == 0 or cols == 0:
        return Matrix.zeros(rows, cols, backend)
    return Matrix([[decode_scalar(x, backend) for x in r] for r in data], backend)


def type_to_json(t: OrbitType) -> list[int]:
    return [t.n0, t.nplus, t.nminus]


def type_from_json(doc) -> OrbitType:
    if not isinstance(doc, list) or len(doc) != 3 or not all(isinstance(x, int) and not isinstance(x, bool) for x in doc):
        raise ParseError("orbit type must be a list [n0, nplus, nminus] of integers")
    try:
        return OrbitType.of(*doc)
    except InvariantError as exc:
        raise ParseError(str(exc)) from exc


def space_to_json(V: SymplecticSpace) -> dict:
    out: dict[str, Any] = {"n": V.n}
    std = SymplecticSpace.standard(V.n, V.omega.backend).omega
    if not (V.omega - std).is_zero():
        out["omega"] = matrix_to_json(V.omega)
    return out


def space_from_json(doc) -> SymplecticSpace:
    n = _require(doc, "n", int)
    if "omega" in doc:
        return SymplecticSpace(n, matrix_from_json(doc["omega"]))
    return SymplecticSpace.standard(n)


def _space_for(doc, rows: int, backend: str) -> SymplecticSpace:
    if isinstance(doc, dict) and "space" in doc:
        return space_from_json(doc["space"])
    if rows % 2:
        raise ParseError("ambient dimension must be even")
    return SymplecticSpace.standard(rows // 2, "rational" if backend in ("rational", "gaussian") else "float")


def subspace_to_json(W: Subspace) -> dict:
    return {"space": space_to_json(W.space), "basis": matrix_to_json(W.basis)}


def subspace_from_json(doc) -> Subspace:
    B = matrix_from_json(_require(doc, "basis", dict))
    return Subspace.span(_space_for(doc, B.rows, B.backend), B)


def lagrangian_to_json(F: ComplexLagrangian) -> dict:
    return {"space": space_to_json(F.space), "frame": matrix_to_json(F.frame)}


def lagrangian_from_json(doc) -> ComplexLagrangian:
    F = matrix_from_json(_require(doc, "frame", dict))
    return make_lagrangian(F, _space_for(doc, F.rows, F.backend))


def split_to_json(S: SplitLagrangian) -> dict:
    return {"space": space_to_json(S.space), "geq0": matrix_to_json(S.geq0), "leq0": matrix_to_json(S.leq0)}


def split_from_json(doc) -> SplitLagrangian:
    a = matrix_from_json(_require(doc, "geq0", dict))
    b = matrix_from_json(_require(doc, "leq0", dict))
    return make_split(_space_for(doc, a.rows, a.backend), a, b)


def darboux_to_json(B: DarbouxBasis) -> dict:
    return {"labels": type_to_json(B.labels), "vectors": matrix_to_json(B.vectors)}


def darboux_from_json(doc) -> DarbouxBasis:
    return DarbouxBasis(matrix_from_json(_require(doc, "vectors", dict)), type_from_json(_require(doc, "labels", list)))


_HFIELDS = ("Eplus", "Eminus", "Fplus", "Fminus", "Y")


def heisenberg_to_json(h: HeisenbergElement) -> dict:
    out: dict[str, Any] = {"n": type_to_json(h.t)}
    out.update({k: matrix_to_json(getattr(h, k)) for k in _HFIELDS})
    return out


def heisenberg_from_json(doc) -> HeisenbergElement:
    t = type_from_json(_require(doc, "n", list))
    return HeisenbergElement(t, *(matrix_from_json(_require(doc, k, dict)) for k in _HFIELDS))


def root_two_to_json(M: RootTwoMatrix) -> dict:
    """M = A + √2·B."""
    return {"A": matrix_to_json(M.A), "sqrt2": matrix_to_json(M.B)}


def root_two_from_json(doc) -> RootTwoMatrix:
    return RootTwoMatrix.of(matrix_from_json(_require(doc, "A", dict)), matrix_from_json(_require(doc, "sqrt2", dict)))


def root_datum_to_json(d: RootDatum) -> dict:
    backend = "gaussian" if d.which == "t" else "rational"
    return {
        "which": d.which,
        "n": d.n,
        "cartan": [matrix_to_json(H) for H in d.cartan],
        "roots": [
            {
                "label": r.label,
                "values": [encode_scalar(v, backend) for v in r.values],
                "vector": matrix_to_json(r.vector),
                "coroot": matrix_to_json(r.coroot),
                "positive": r.positive,
                "strongly_orthogonal": r.strongly_orthogonal,
                "compact": r.compact,
            }
            for r in d.roots
        ],
    }


def decode_object(doc):
    """Subspace, ComplexLagrangian, SplitLagrangian, DarbouxBasis or HeisenbergElement by its fields."""
    if not isinstance(doc, dict):
        raise ParseError("expected a JSON object")
    if "basis" in doc:
        return subspace_from_json(doc)
    if "frame" in doc:
        return lagrangian_from_json(doc)
    if "geq0" in doc:
        return split_from_json(doc)
    if "vectors" in doc:
        return darboux_from_json(doc)
    if "Y" in doc:
        return heisenberg_from_json(doc)
    if "rows" in doc:
        return matrix_from_json(doc)
    raise ParseError("unrecognized document; expected basis, frame, geq0/leq0, vectors or Heisenberg fields")


def encode_object(x) -> dict:
    for kind, fn in (
        (Subspace, subspace_to_json),
        (ComplexLagrangian, lagrangian_to_json),
        (SplitLagrangian, split_to_json),
        (DarbouxBasis, darboux_to_json),
        (HeisenbergElement, heisenberg_to_json),
        (RootDatum, root_datum_to_json),
        (RootTwoMatrix, root_two_to_json),
        (Matrix, matrix_to_json),
    ):
        if isinstance(x, kind):
            return fn(x)
    raise InvariantError(f"cannot encode {type(x).__name__}")


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc


def dumps(doc) -> str:
    return json.dumps(doc, separators=(",", ":"))
