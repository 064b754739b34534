import json
import subprocess
import sys

import pytest

from tenrank.cli import main
from tenrank.decompositions import decompose_w
from tenrank.serialize import decomposition_to_obj, dumps

from .oracles import weak_compositions


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_gen_state_l34(tmp_path, capsys):
    path = tmp_path / "l34.json"
    code, _, _ = run(capsys, "gen-state", "--family", "l", "--d", "3", "--n", "4", "-o", str(path))
    assert code == 0
    obj = json.loads(path.read_text())
    assert obj["format"] == 1 and obj["label"] == "L(3,4)"
    assert len(obj["entries"]) == len(weak_compositions(2, 4)) == 10


def test_rank_cert_l34(tmp_path, capsys):
    path = tmp_path / "l34.json"
    run(capsys, "gen-state", "--family", "l", "--d", "3", "--n", "4", "-o", str(path))
    code, rep, _ = run(capsys, "rank-cert", str(path))
    assert code == 0
    rank = rep["subjects"][0]["rank"]
    assert (rank["lower"], rank["upper"], rank["exact"]) == (7, 7, True)
    assert rep["format"] == 1 and rep["command"] == "rank-cert"


def test_rank_cert_batch_in_parallel(tmp_path, capsys):
    paths = []
    for fam, d in (("m", 3), ("n", 4), ("w", 2)):
        p = tmp_path / f"{fam}.json"
        run(capsys, "gen-state", "--family", fam, "--d", str(d), "--n", "3", "-o", str(p))
        paths.append(str(p))
    code, rep, _ = run(capsys, "rank-cert", "--jobs", "2", *paths)
    assert code == 0
    assert [s["rank"]["lower"] for s in rep["subjects"]] == [5, 7, 3]


def test_rate_ghz_n(capsys):
    code, rep, _ = run(capsys, "rate", "--source", "ghz", "--target", "n", "--d", "3", "--n", "3")
    assert code == 0 and rep["result"] == "RateOne"


def test_unrecognized_needs_cert(tmp_path, capsys):
    p = tmp_path / "g.json"
    run(capsys, "gen-state", "--family", "ghz", "--d", "2", "--n", "3", "-o", str(p))
    code, _, err = run(capsys, "rank-cert", str(p))
    assert code == 2 and "--cert" in err
    code, _, err = run(capsys, "rank-cert", "--cert", "qubit", str(p))
    assert code == 1 and "not persistent" in err


def test_verify_decomp(tmp_path, capsys):
    t = tmp_path / "w.json"
    run(capsys, "gen-state", "--family", "w", "--n", "3", "-o", str(t))
    dec = tmp_path / "dec.json"
    dec.write_text(dumps(decomposition_to_obj(decompose_w(3))))
    code, rep, _ = run(capsys, "verify-decomp", str(t), str(dec))
    assert code == 0 and rep["rank_upper_bound"] == 3
    short = decomposition_to_obj(decompose_w(3))
    short["terms"] = short["terms"][:2]
    dec.write_text(dumps(short))
    code, _, _ = run(capsys, "verify-decomp", str(t), str(dec))
    assert code == 1


def test_persist_methods(tmp_path, capsys):
    p = tmp_path / "ns.json"
    run(capsys, "gen-state", "--family", "nonsym4", "--alpha", "1", "--beta", "2", "-o", str(p))
    code, rep, _ = run(capsys, "persist", str(p), "--candidate", "0,1")
    assert code == 0 and rep["result"] == "Persistent"
    assert rep["certificate"]["method"] == "EXACT_QUBIT"
    d = tmp_path / "d.json"
    run(capsys, "gen-state", "--family", "dicke", "--n", "4", "--l", "2", "-o", str(d))
    code, rep, _ = run(capsys, "persist", str(d))
    assert code == 0 and rep["result"] == "NotPersistent"
    l = tmp_path / "l.json"
    run(capsys, "gen-state", "--family", "l", "--d", "3", "--n", "3", "-o", str(l))
    code, rep, _ = run(capsys, "persist", str(l), "--method", "screen", "--seed", "3", "--trials", "5")
    assert rep["result"] == "LikelyPersistent" and rep["conclusive"] is False
    code, rep, _ = run(capsys, "persist", str(l))
    assert rep["certificate"]["method"] == "PYRAMID"


def test_degen_border_kron(capsys, tmp_path):
    code, rep, _ = run(capsys, "degen", "--source", "l", "--target", "n", "--d", "3", "--n", "4")
    assert code == 0 and rep["degeneration"]["verified"]
    code, rep, _ = run(capsys, "border", "--family", "nprime", "--d", "4", "--n", "3")
    assert code == 0 and rep["border_rank"]["lower"] == rep["border_rank"]["upper"] == 4
    out = tmp_path / "k.json"
    code, rep, _ = run(capsys, "kron-cert", "--family", "ww", "--d", "2", "--n", "3", "--decomp-out", str(out))
    assert code == 0 and rep["rank"]["lower"] == rep["rank"]["upper"] == 14
    assert len(json.loads(out.read_text())["terms"]) == 14


def test_degen_from_files(tmp_path, capsys):
    from tenrank.degeneration import canonical_chain_maps
    from tenrank.serialize import map_to_obj

    src, tgt, maps = tmp_path / "s.json", tmp_path / "t.json", tmp_path / "m.json"
    run(capsys, "gen-state", "--family", "m", "--d", "3", "--n", "3", "-o", str(src))
    run(capsys, "gen-state", "--family", "n", "--d", "3", "--n", "3", "-o", str(tgt))
    maps.write_text(dumps(map_to_obj(canonical_chain_maps("M_TO_N", 3, 3))))
    code, rep, _ = run(capsys, "degen", "--source-file", str(src), "--maps", str(maps), "--target-file", str(tgt))
    assert code == 0 and rep["degeneration"]["verified"]
    code, _, _ = run(capsys, "degen", "--source-file", str(tgt), "--maps", str(maps), "--target-file", str(src))
    assert code == 1


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "rank-cert", str(tmp_path / "missing.json"))[0] == 2
    code, _, err = run(capsys, "gen-state", "--family", "l", "--d", "1")
    assert code == 2 and "d >= 2" in err
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2


def test_reports_are_deterministic(capsys):
    a = run(capsys, "border", "--family", "m", "--d", "3", "--n", "3")[1]
    b = run(capsys, "border", "--family", "m", "--d", "3", "--n", "3")[1]
    assert a == b and "wall_time_s" not in a
    timed = run(capsys, "--timing", "border", "--family", "m", "--d", "3", "--n", "3")[1]
    assert "wall_time_s" in timed


def test_selftest_subset(capsys):
    code, rep, err = run(capsys, "selftest", "--only", "7")
    assert code == 0 and rep["passed"] and "[PASS]  7" in err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "tenrank", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("tenrank ")
