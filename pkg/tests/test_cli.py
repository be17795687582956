import csv
import json

import numpy as np
import pytest

from kronvex import cli
from kronvex.conjecture import MatrixPair, phi
from kronvex.io import (
    FORMAT,
    dumps,
    format_float,
    matrix_from_json,
    matrix_to_json,
    pair_from_json,
    pair_to_json,
    read_json,
)
from conftest import cnormal



def strip_timing(d):
    d = dict(d)
    d.pop("timestamps")
    return d


def test_verify_ok(tmp_path):
    out = tmp_path / "v.json"
    assert cli.main(["verify", "--suite", "vec_identity", "-n", "100", "--seed", "7", "--out", str(out)]) == 0
    d = read_json(out)
    assert d["format"] == FORMAT and d["seed"] == 7
    r = d["results"][0]
    assert r["seed"] == 7 and r["passed"]
    assert r["worst_margin"] >= -1e-12


def test_verify_rerun_is_identical_except_timestamps(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert cli.main(["verify", "--suite", "case_i", "--suite", "normal", "-n", "50",
                         "--seed", "3", "--out", str(p)]) == 0
    a, b = (read_json(p) for p in paths)
    assert strip_timing(a) == strip_timing(b)
    text = [p.read_text().splitlines() for p in paths]
    diff = [i for i, (x, y) in enumerate(zip(*text)) if x != y]
    keys = {text[0][i].split(":")[0].strip() for i in diff}
    assert keys <= {'"started_at"', '"finished_at"', '"case_i"', '"normal"'}


def test_verify_unknown_suite(capsys):
    assert cli.main(["verify", "--suite", "nosuch"]) == 1
    assert "unknown suite" in capsys.readouterr().err


def test_verify_violation_exit_code(monkeypatch, tmp_path):
    import kronvex.suites as S
    base = S.SUITES["normal"]
    broken = S.Suite("broken", base.tolerance, base.draw,
                     lambda inp: {"too_strict": (0.1 - S.phi_from_stack(inp["A"], inp["B"]), 1e-9)})
    monkeypatch.setitem(S.SUITES, "broken", broken)
    out = tmp_path / "v.json"
    assert cli.main(["verify", "--suite", "broken", "-n", "20", "--out", str(out)]) == 2
    r = read_json(out)["results"][0]
    assert not r["passed"] and r["violations"]
    assert all(v["seed"] == 0 for v in r["violations"])


def test_bad_flags_exit_one():
    assert cli.main(["search", "--restarts", "0"]) == 1
    with pytest.raises(SystemExit) as e:
        cli.main(["search", "--restarts", "abc"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        cli.main(["nosuchcommand"])
    assert e.value.code == 1


def test_search_outputs(tmp_path):
    js, cs = tmp_path / "s.json", tmp_path / "t.csv"
    assert cli.main(["search", "--restarts", "3", "--max-iters", "40", "--seed", "1",
                     "--out", str(js), "--csv", str(cs)]) == 0
    r = read_json(js)["results"][0]
    assert r["best_phi"] <= 0.5 + 1e-6
    with open(cs) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["restart", "iter", "phi", "margin"]
    accepted = sum(1 for row in rows if row["iter"] != "0")
    assert accepted == r["accepted_steps"]
    assert len(rows) == 3 + accepted
    assert max(float(row["phi"]) for row in rows) == r["best_phi"]
    best = pair_from_json(r["best_pair"])
    assert best.digest() == r["best_pair_digest"]


def test_search_counterexample_exit_code(monkeypatch, tmp_path):
    class Fake:
        best_phi = 0.6
        margin = -0.1
        best_pair = MatrixPair(np.zeros((4, 4)), np.zeros((4, 4)))
        best_pair_digest = "x"
        best_restart = 0
        trajectory = [(0, 0, 0.6)]
        converged = True
        restarts_converged = 1
        fd_fallbacks = 0
        violations = [{"verified": True}]
        verified_violation = True
    monkeypatch.setattr(cli, "maximize_phi", lambda config, workers=None: Fake())
    assert cli.main(["search", "--restarts", "1", "--out", str(tmp_path / "s.json")]) == 3
    Fake.violations = [{"verified": False}]
    Fake.verified_violation = False
    assert cli.main(["search", "--restarts", "1", "--out", str(tmp_path / "s.json")]) == 0


def test_family_csv_and_dump(tmp_path):
    out, dump = tmp_path / "f.csv", tmp_path / "d.json"
    assert cli.main(["family", "case_i", "-n", "10", "--seed", "1", "--out", str(out),
                     "--dump", str(dump)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 10
    assert list(rows[0]) == ["index", "phi", "margin", "trace_A_residual", "trace_B_residual",
                             "norm_residual"]
    assert all(float(r["margin"]) >= -1e-9 for r in rows)
    pairs = [pair_from_json(p) for p in read_json(dump)["pairs"]]
    for p, r in zip(pairs, rows):
        assert abs(phi(p).phi - float(r["phi"])) <= 1e-12


def test_family_empty_and_unknown(tmp_path, capsys):
    out = tmp_path / "f.csv"
    assert cli.main(["family", "uniform", "-n", "0", "--out", str(out)]) == 0
    assert out.read_text().strip().splitlines() == [
        "index,phi,margin,trace_A_residual,trace_B_residual,norm_residual"]
    assert cli.main(["family", "nope"]) == 1


def test_replay_and_histogram(tmp_path):
    out = tmp_path / "r.json"
    assert cli.main(["replay", "case_ii", "--index", "5", "--seed", "2", "--out", str(out)]) == 0
    d = read_json(out)
    assert d["index"] == 5 and "params" in d["inputs"]
    assert cli.main(["replay", "nosuch", "--index", "0"]) == 1
    h = tmp_path / "h.csv"
    assert cli.main(["histogram", "-n", "500", "--bins", "4", "--out", str(h)]) == 0
    assert len(h.read_text().splitlines()) == 5


def test_env_threads_does_not_change_results(monkeypatch, tmp_path):
    outs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("KRONVEX_THREADS", threads)
        p = tmp_path / f"v{threads}.json"
        assert cli.main(["verify", "--suite", "normal", "-n", "1200", "--out", str(p)]) == 0
        outs.append(strip_timing(read_json(p)))
    assert outs[0] == outs[1]


# serialization ---------------------------------------------------------------

def test_matrix_json_roundtrip_is_exact(rng):
    M = cnormal(rng, (4, 3))
    d = json.loads(dumps(matrix_to_json(M)))
    assert d["rows"] == 4 and d["cols"] == 3 and d["format"] == FORMAT
    assert d["entries"][1] == [M[0, 1].real, M[0, 1].imag]  # row-major
    assert np.array_equal(matrix_from_json(d), M)


def test_pair_json_roundtrip(rng):
    p = MatrixPair(cnormal(rng, (4, 4)), cnormal(rng, (4, 4)))
    q = pair_from_json(json.loads(dumps(pair_to_json(p))))
    assert q == p


def test_bad_matrix_json():
    with pytest.raises(ValueError):
        matrix_from_json({"format": "other", "rows": 1, "cols": 1, "entries": [[0, 0]]})
    with pytest.raises(ValueError):
        matrix_from_json({"rows": 2, "cols": 2, "entries": [[0, 0]]})


def test_float_formats_keep_sign_and_bits():
    for x in (-1e-17, 0.1, 1 / 3, -2.2250738585072014e-308):
        assert float(format_float(x)) == x
        assert json.loads(dumps({"x": x}))["x"] == x
    assert json.loads(dumps({"x": float("inf")}))["x"] == "inf"
