import json
import re

import jsonschema
import pytest

from fgadyn.catalog import RANK4_TOML
from fgadyn.cli import main

CLAIM = {
    "type": "object",
    "required": ["id", "statement", "verdict", "bounds", "detail"],
    "properties": {
        "verdict": {"enum": ["reproduced", "refuted-at-scale", "inconclusive"]},
        "bounds": {"type": "string", "pattern": "="},
        "detail": {"type": "string"},
        "per_convention": {
            "type": "object",
            "required": ["right", "left"],
            "additionalProperties": {
                "type": "object", "required": ["verdict"],
                "properties": {"verdict": {"enum": ["reproduced", "refuted-at-scale", "inconclusive"]}},
            },
        },
    },
}
REPORT = {
    "type": "object",
    "required": ["schema", "scale", "seed", "threads", "claims", "summary"],
    "properties": {"schema": {"const": 1}, "claims": {"type": "array", "items": CLAIM}},
}


@pytest.fixture
def session_file(tmp_path):
    p = tmp_path / "ex.toml"
    p.write_text(RANK4_TOML)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_strata_json(capsys, session_file):
    code, out, _ = run(capsys, "strata", "--aut", session_file, "--name", "Psi")
    assert code == 0
    assert json.loads(out)["strata"] == [
        {"edges": ["a", "b", "c"], "class": "EG", "lambda": 1.465571},
        {"edges": ["d"], "class": "NEG"},
    ]


def test_critical_neg_stratum(capsys, session_file):
    code, _, err = run(capsys, "critical", "--aut", session_file, "--name", "Psi", "--stratum", "1")
    assert code == 1 and "λ = 1" in err


def test_critical_doubles(capsys):
    code, out, _ = run(capsys, "critical", "--bcc", "3", "--lambda", "2")
    assert code == 0 and json.loads(out)["critical"] == "6"


def test_cap_exit_code(capsys):
    code, _, err = run(capsys, "primitive", "--word", "ab" * 40)
    assert code == 2 and "cap" in err


def test_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text('rank = 2\n[aut.X]\na -> aA\nb -> b\n')
    assert run(capsys, "invert", "--aut", str(bad), "--name", "X")[0] == 1
    assert run(capsys, "invert", "--aut", str(tmp_path / "missing.toml"), "--name", "X")[0] == 1
    assert run(capsys, "invert", "--name", "Nope")[0] == 1
    assert run(capsys, "invert", "--images", "aa,b")[0] == 1


def test_rank_warning(capsys):
    code, _, err = run(capsys, "atoroidal", "--name", "twist")
    assert code == 0 and "warning: rank 2" in err


def test_growth_tsv(capsys):
    code, out, _ = run(capsys, "growth", "--name", "twist", "--word", "b", "-n", "25")
    lines = out.splitlines()
    assert lines[0].startswith("# polynomial")
    assert lines[1] == "iterate\tcyclic_length"
    assert [int(x.split("\t")[1]) for x in lines[2:]] == list(range(1, 27))


def test_growth_partition(capsys):
    code, out, _ = run(capsys, "growth", "--name", "Phi2", "-L", "2", "-n", "25", "--json")
    d = json.loads(out)
    assert d["counts"]["inconclusive"] == 0 and "L=2" in d["bounds"]


def test_malnormal_and_meet(capsys):
    _, out, _ = run(capsys, "malnormal", "--system", "a;Bab", "--rank", "2")
    assert json.loads(out) == {"malnormal": False, "witness": {"s": 1, "t": 2, "x": "b"}}
    _, out, _ = run(capsys, "meet", "--s1", "a,b", "--s2", "b,c", "--rank", "3")
    assert json.loads(out) == {"meet": [["b"]]}


def test_invert_and_fiber(capsys, session_file):
    _, out, _ = run(capsys, "invert", "--aut", session_file, "--name", "Phi", "--json")
    assert json.loads(out)["inverse"] == ["b", "c", "d", "Ba"]
    _, out, _ = run(capsys, "fiber", "--aut", session_file, "--name", "Phi^-1 Psi",
                    "--compose-order", "left")
    d = json.loads(out)
    assert d["stabilized_at"] == 1 and d["contains"]["d"] and not d["contains"]["a"]


def test_zz_and_flare(capsys, session_file):
    _, out, _ = run(capsys, "zz", "--lifts", session_file, "-L", "4", "-P", "4")
    certs = json.loads(out)["certificates"]
    assert any(c["fiber_word"] == "b" and c["q"] == "t1^-1 t2" for c in certs)
    _, out, _ = run(capsys, "flare", "--names", "Phi", "-m", "6", "-L", "4", "--lambda", "1.05")
    assert json.loads(out)["pass_fraction"] == 1.0


def test_ball_export(capsys, tmp_path):
    lifts = tmp_path / "z.toml"
    lifts.write_text('rank = 1\n[aut.T]\na = "a"\n')
    per = tmp_path / "per.json"
    per.write_text(json.dumps([{"subgroup": ["a"], "stabilizer": ["t1"]}]))
    tsv = tmp_path / "ball.tsv"
    code, out, _ = run(capsys, "ball", "--lifts", str(lifts), "--radius", "3", "--cone", str(per),
                       "--stats", "200", "--seed", "7", "--export", str(tsv))
    assert code == 0
    stats = json.loads(out)
    assert stats["electrified_le_word"] and stats["seed"] == 7
    rows = tsv.read_text().splitlines()
    assert rows[0].startswith("# src")
    assert {r.split("\t")[2] for r in rows[1:]} <= {"1", "2"}


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("FGADYN_THREADS", "0")
    assert run(capsys, "bcc", "--name", "Phi")[0] == 1


def test_verify_paper_schema(capsys):
    code, out, _ = run(capsys, "verify-paper", "--json", "-L", "4", "-n", "12")
    assert code == 0
    rep = json.loads(out)
    jsonschema.validate(rep, REPORT)
    ids = [c["id"] for c in rep["claims"]]
    assert len(ids) == len(set(ids))
    for c in rep["claims"]:
        # heuristic verdicts name their bounds
        assert re.search(r"(L|K_max|q_len|pf_tol)=\d", c["detail"])
