from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import float_lagrangian, float_split, rational_matrix, random_subspace
from symplecta import jsonio
from symplecta.darboux import darboux_extend
from symplecta.errors import InvariantError, ParseError
from symplecta.heisenberg import HeisenbergElement
from symplecta.lagrangian import basepoint, split_basepoint
from symplecta.lie import SQRT_I, cayley_transforms, root_data
from symplecta.numeric import Gaussian, Matrix, span_equal
from symplecta.space import OrbitType, all_types


def _round(doc):
    return json.loads(jsonio.dumps(doc))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), rows=st.integers(0, 4), cols=st.integers(0, 4))
def test_rational_matrix_round_trip(seed, rows, cols):
    M = rational_matrix(np.random.default_rng(seed), rows, cols, den=5)
    assert jsonio.matrix_from_json(_round(jsonio.matrix_to_json(M))) == M


def test_gaussian_and_float_round_trip():
    G = Matrix([[Gaussian(1, Fraction(-1, 3)), Gaussian(0, 2)]], "gaussian")
    assert jsonio.matrix_from_json(_round(jsonio.matrix_to_json(G))) == G
    rng = np.random.default_rng(0)
    for backend, a in (("float", rng.normal(size=(3, 2))), ("complex", rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))):
        M = Matrix.from_numpy(a)
        assert M.backend == backend
        back = jsonio.matrix_from_json(_round(jsonio.matrix_to_json(M)))
        assert back.backend == backend
        assert np.array_equal(back.to_numpy(), a)


def test_rational_entries_are_strings():
    doc = jsonio.matrix_to_json(Matrix([[Fraction(1, 2), 3]]))
    assert doc["data"] == [["1/2", "3"]]


@pytest.mark.parametrize(
    "doc",
    [
        {"rows": 1, "cols": 2, "data": [["1"]]},
        {"rows": 1, "cols": 1, "data": [["x"]]},
        {"rows": 1, "cols": 1, "data": [[1.5]]},
        {"rows": 1, "cols": 1, "backend": "quaternion", "data": [["1"]]},
        {"rows": 1, "cols": 1, "backend": "complex", "data": [[1.0]]},
        {"cols": 1, "data": []},
        [1, 2],
    ],
)
def test_malformed_matrices_raise_parse_error(doc):
    with pytest.raises(ParseError):
        jsonio.matrix_from_json(doc)


def test_malformed_text():
    with pytest.raises(ParseError):
        jsonio.loads("{not json")


def test_subspace_round_trip():
    rng = np.random.default_rng(1)
    for n, k in ((1, 1), (2, 3), (3, 2)):
        W = random_subspace(rng, n, k)
        W2 = jsonio.decode_object(_round(jsonio.encode_object(W)))
        assert W2.space.n == n
        assert span_equal(W.basis, W2.basis)


@pytest.mark.parametrize("t", all_types(2), ids=str)
def test_lagrangian_and_split_round_trip(t):
    F = basepoint(t)
    F2 = jsonio.decode_object(_round(jsonio.encode_object(F)))
    assert F2.frame == F.frame
    S = split_basepoint(t)
    S2 = jsonio.decode_object(_round(jsonio.encode_object(S)))
    assert (S2.geq0, S2.leq0) == (S.geq0, S.leq0)


def test_float_objects_round_trip():
    rng = np.random.default_rng(2)
    t = OrbitType(0, 1, 1)
    F = float_lagrangian(rng, t)
    F2 = jsonio.decode_object(_round(jsonio.encode_object(F)))
    # decoding renormalizes the frame; the point of Lag^C is what must survive
    assert span_equal(F2.frame, F.frame)
    S = float_split(rng, t)
    S2 = jsonio.decode_object(_round(jsonio.encode_object(S)))
    assert span_equal(S2.geq0, S.geq0) and span_equal(S2.leq0, S.leq0)


def test_darboux_round_trip():
    W = random_subspace(np.random.default_rng(3), 2, 2)
    B = darboux_extend(W)
    B2 = jsonio.decode_object(_round(jsonio.encode_object(B)))
    assert B2.vectors == B.vectors and B2.labels == B.labels


def test_heisenberg_round_trip():
    t = OrbitType(1, 1, 0)
    one = Matrix([[1]])
    h = HeisenbergElement(t, one, Matrix.zeros(1, 0), one * 2, Matrix.zeros(1, 0), Matrix([[5]]))
    h2 = jsonio.decode_object(_round(jsonio.encode_object(h)))
    assert h2.t == t
    assert all(getattr(h2, k) == getattr(h, k) for k in ("Eplus", "Eminus", "Fplus", "Fminus", "Y"))


def test_root_two_round_trip():
    cG, _, _ = cayley_transforms(1, 0, 1)
    assert jsonio.root_two_from_json(_round(jsonio.encode_object(cG))) == SQRT_I


def test_root_datum_encodes_every_root():
    doc = _round(jsonio.encode_object(root_data("t", 2)))
    assert len(doc["roots"]) == 8
    assert doc["roots"][0]["vector"]["backend"] == "gaussian"


def test_type_validation():
    assert jsonio.type_from_json([0, 1, 2]) == OrbitType(0, 1, 2)
    for bad in ([0, 1], [0, -1, 1], [0, 1, True], "x"):
        with pytest.raises(ParseError):
            jsonio.type_from_json(bad)


def test_unrecognized_document():
    with pytest.raises(ParseError):
        jsonio.decode_object({"hello": 1})
    with pytest.raises(InvariantError):
        jsonio.encode_object(object())
