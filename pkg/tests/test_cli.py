from __future__ import annotations

import csv
import io
import json

import numpy as np
import pytest

from helpers import exact_symplectic
from symplecta import cli, jsonio
from symplecta.errors import ConvergenceError
from symplecta.lagrangian import basepoint, make_lagrangian
from symplecta.numeric import Gaussian, Matrix, span_equal
from symplecta.orbits import orbit_dim
from symplecta.space import OrbitType


def _write(tmp_path, name: str, doc) -> str:
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def _run(capsys, *argv: str) -> tuple[int, str, str]:
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _frame_doc(rows) -> dict:
    M = Matrix([[Gaussian(*x) if isinstance(x, tuple) else Gaussian(x) for x in r] for r in rows], "gaussian")
    return jsonio.matrix_to_json(M)


def test_classify_upper_hemisphere_point(tmp_path, capsys):
    path = _write(tmp_path, "f.json", {"frame": _frame_doc([[(0, 1)], [1]])})
    code, out, err = _run(capsys, "classify", path)
    assert code == 0
    assert json.loads(out) == [0, 1, 0]
    assert "lagrangian" in err


def test_classify_line_in_plane(tmp_path, capsys):
    path = _write(tmp_path, "w.json", {"basis": {"rows": 2, "cols": 1, "data": [["1"], ["0"]]}})
    code, out, _ = _run(capsys, "classify", path)
    assert (code, json.loads(out)) == (0, [1, 0, 0])
    code, out, _ = _run(capsys, "classify", "--explain", path)
    doc = json.loads(out)
    assert doc["explain"]["dim_radical"] == 1 and doc["explain"]["dim_complement"] == 1


def test_classify_reads_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps({"basis": {"rows": 2, "cols": 2, "data": [["1", "0"], ["0", "1"]]}})))
    code, out, _ = _run(capsys, "classify")
    assert (code, json.loads(out)) == (0, [0, 1, 0])


def _random_frames(count: int) -> list[dict]:
    rng = np.random.default_rng(11)
    docs = []
    for k in range(count):
        t = OrbitType(0, k % 2, 1 - k % 2) if k % 3 else OrbitType(1, 0, 0)
        F = basepoint(t)
        g = exact_symplectic(rng, 1)
        docs.append(jsonio.encode_object(make_lagrangian(g.to("gaussian") @ F.frame, F.space)))
    return docs


@pytest.mark.parametrize("jobs", ["1", "2"])
def test_batch_of_100_frames(tmp_path, capsys, jobs):
    docs = _random_frames(100)
    path = _write(tmp_path, "batch.json", docs)
    code, out, _ = _run(capsys, "classify", "--jobs", jobs, path)
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 100
    expected = [[0, k % 2, 1 - k % 2] if k % 3 else [1, 0, 0] for k in range(100)]
    assert [json.loads(line) for line in lines] == expected


def test_malformed_json_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{oops")
    code, out, err = _run(capsys, "classify", str(p))
    assert code == 2 and out == "" and "parse error" in err


def test_missing_file_and_bad_flags_exit_2(capsys):
    assert _run(capsys, "classify", "/nonexistent/file.json")[0] == 2
    assert _run(capsys, "orbit-dim", "--kind", "Lag")[0] == 2
    assert _run(capsys, "no-such-command")[0] == 2


def test_invariant_failure_exits_3(tmp_path, capsys):
    # a 2-frame in C^2 cannot be Lagrangian
    path = _write(tmp_path, "f.json", {"frame": _frame_doc([[1, 0], [0, 1]])})
    code, _, err = _run(capsys, "classify", path)
    assert code == 3 and err.strip()


def test_non_convergence_exits_4(tmp_path, capsys, monkeypatch):
    def fail(*args, **kwargs):
        raise ConvergenceError("factorization did not converge", 1e-2)

    monkeypatch.setattr(cli, "retract", fail)
    path = _write(tmp_path, "f.json", {"frame": _frame_doc([[(0, 1)], [1]])})
    code, _, err = _run(capsys, "retract", "--map", "beta", path)
    assert code == 4 and "residual" in err


def test_tolerance_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("SYMPLECTA_TOL", "not-a-number")
    assert _run(capsys, "orbit-dim", "--kind", "Lag", "--type", "0", "1", "0")[0] == 2
    monkeypatch.setenv("SYMPLECTA_TOL", "1e-6")
    assert _run(capsys, "orbit-dim", "--kind", "Lag", "--type", "0", "1", "0")[0] == 0


def test_retract_beta_at_n1_lands_on_the_point(tmp_path, capsys):
    path = _write(tmp_path, "f.json", {"frame": _frame_doc([[(1, 2)], [1]])})
    code, out, _ = _run(capsys, "retract", "--map", "beta", path)
    doc = json.loads(out)
    assert code == 0 and doc["membership"] == "pass"
    F = jsonio.decode_object(doc["output"])
    assert span_equal(F.frame.to("complex"), Matrix.from_numpy(np.array([[1j], [1]])))


def test_retract_gamma_identity_on_member(tmp_path, capsys):
    doc = {"basis": {"rows": 4, "cols": 1, "data": [["1"], ["0"], ["0"], ["0"]]}}
    code, out, _ = _run(capsys, "retract", "--map", "gamma", _write(tmp_path, "w.json", doc))
    res = json.loads(out)
    assert code == 0 and res["residual"] == 0.0 and res["membership"] == "pass"
    W = jsonio.decode_object(res["output"])
    assert span_equal(W.basis.to("float"), Matrix.from_numpy(np.array([[1.0], [0], [0], [0]])))


def test_retract_random_input_passes_membership(tmp_path, capsys):
    rng = np.random.default_rng(4)
    g = exact_symplectic(rng, 2)
    F = basepoint(OrbitType(0, 1, 1))
    G = make_lagrangian(g.to("gaussian") @ F.frame, F.space)
    W = {"basis": jsonio.matrix_to_json(g @ Matrix([[1, 0], [0, 0], [0, 0], [0, 1]]))}
    for m, doc in (("beta", jsonio.encode_object(G)), ("gamma", W)):
        code, out, _ = _run(capsys, "retract", "--map", m, _write(tmp_path, f"{m}.json", doc))
        assert code == 0 and json.loads(out)["membership"] == "pass"


def test_complement_darboux_reduce(tmp_path, capsys):
    # span{e1, e2, f1}: radical span{e2} plus a symplectic plane
    doc = {"basis": {"rows": 4, "cols": 3, "data": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"], ["0", "0", "0"]]}}
    path = _write(tmp_path, "w.json", doc)
    code, out, _ = _run(capsys, "complement", path)
    assert code == 0 and jsonio.decode_object(json.loads(out)).dim == 1
    code, out, _ = _run(capsys, "darboux", path)
    B = jsonio.decode_object(json.loads(out))
    assert code == 0 and tuple(B.labels) == (1, 1, 0)
    code, out, _ = _run(capsys, "reduce", path)
    res = json.loads(out)
    assert code == 0 and res["m"] == 1 and res["image_type"] == [0, 1, 0]


def test_orbit_dim_and_incidence(capsys):
    code, out, _ = _run(capsys, "orbit-dim", "--kind", "Lag", "--type", "1", "1", "0", "--explain")
    doc = json.loads(out)
    assert code == 0 and doc["dim"] == orbit_dim("Lag", OrbitType(1, 1, 0)) == doc["stabilizer_check"]
    code, out, _ = _run(capsys, "incidence", "--kind", "Lag", "--from", "0", "1", "1", "--to", "1", "0", "1")
    assert code == 0 and isinstance(json.loads(out)["in_closure"], bool)


def _csv(out: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(out)))


def test_sphere_demo_statistics(capsys):
    code, out, _ = _run(capsys, "sphere-demo", "--samples", "1000", "--seed", "7")
    rows = _csv(out)
    assert code == 0 and len(rows) == 1000
    counts = {t: sum(r["type"] == t for r in rows) for t in ("(0,1,0)", "(0,0,1)", "(1,0,0)")}
    assert counts["(1,0,0)"] == 0
    assert abs(counts["(0,1,0)"] - 500) <= 50 and abs(counts["(0,0,1)"] - 500) <= 50
    for r in rows:
        q = complex(float(r["q_re"]), float(r["q_im"]))
        p = complex(float(r["p_re"]), float(r["p_im"]))
        kappa = 2 * (q * p.conjugate()).imag
        assert r["type"] == ("(0,1,0)" if kappa > 0 else "(0,0,1)")


def test_sphere_demo_deterministic(capsys):
    a = _run(capsys, "sphere-demo", "--samples", "50", "--seed", "3")[1]
    b = _run(capsys, "sphere-demo", "--samples", "50", "--seed", "3")[1]
    assert a == b


def test_sphere_demo_equator_and_empty(capsys):
    code, out, _ = _run(capsys, "sphere-demo", "--equator-sweep", "8")
    rows = _csv(out)
    assert code == 0 and [r["type"] for r in rows] == ["(1,0,0)"] * 8
    assert _run(capsys, "sphere-demo", "--samples", "0")[0] == 2


def test_roots_and_cayley(capsys):
    code, out, _ = _run(capsys, "roots", "--n", "2", "--cartan", "a")
    assert code == 0 and len(json.loads(out)["roots"]) == 8
    code, out, _ = _run(capsys, "cayley", "--gamma", "1", "--sigma", "1", "--n", "3")
    assert code == 0 and json.loads(out)["type"] == [1, 1, 1]


def test_heisenberg_commands(tmp_path, capsys):
    code, out, _ = _run(capsys, "heisenberg", "--op", "dim", "--type", "1", "1", "0")
    assert code == 0 and json.loads(out)["dim"] == 3
    h = {
        "n": [1, 1, 0],
        "Eplus": {"rows": 1, "cols": 1, "data": [["1"]]},
        "Eminus": {"rows": 1, "cols": 0, "data": [[]]},
        "Fplus": {"rows": 1, "cols": 1, "data": [["2"]]},
        "Fminus": {"rows": 1, "cols": 0, "data": [[]]},
        "Y": {"rows": 1, "cols": 1, "data": [["5"]]},
    }
    path = _write(tmp_path, "h.json", h)
    for op in ("matrix", "inverse", "ziegler"):
        code, out, _ = _run(capsys, "heisenberg", "--op", op, path)
        assert code == 0 and json.loads(out)
