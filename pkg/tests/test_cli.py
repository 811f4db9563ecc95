import json
import subprocess
import sys

from csprove.cli import main
from csprove.model import model_from_json, validate_model
from csprove.proofgraph import check_proof, graph_from_json


def test_decide_proved(capsys, tmp_path):
    out = tmp_path / "proof.json"
    assert main(["decide", "[b]([b]p->p)->[d][b]p", "--proof-out", str(out)]) == 0
    assert capsys.readouterr().out == "PROVED\n"
    check_proof(graph_from_json(out.read_text()))
    assert main(["check", "--proof", str(out)]) == 0
    assert capsys.readouterr().out == "OK\n"


def test_decide_refuted_with_model(capsys, tmp_path):
    out = tmp_path / "m.json"
    assert main(["decide", "[d]p->[b]p", "--model-out", str(out), "--dot"]) == 1
    assert capsys.readouterr().out == "REFUTED\n"
    validate_model(model_from_json(out.read_text()))
    assert (tmp_path / "m.dot").read_text().startswith("digraph")


def test_dot_to_stdout(capsys):
    assert main(["decide", "bot", "--dot"]) == 1
    out = capsys.readouterr().out
    assert out.startswith("REFUTED\ndigraph")


def test_syntax_error(capsys):
    assert main(["decide", "p ->"]) == 2
    assert "byte offset 4" in capsys.readouterr().err


def test_usage_errors(capsys, tmp_path):
    assert main([]) == 2
    assert main(["decide"]) == 2
    assert main(["decide", "p", "--sequent", "{}"]) == 2
    assert main(["check", "--proof", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{\"root\": 0}")
    assert main(["check", "--proof", str(bad)]) == 2
    assert main(["sweep", "--atoms", ","]) == 2
    assert main(["sweep", "--max-nodes", "0"]) == 2
    capsys.readouterr()


def test_root_precondition_is_usage_error(capsys):
    seq = json.dumps({"rels": [["x0", "R", "x1"], ["x1", "R", "x0"]], "left": [], "right": [["x0", "p"]]})
    assert main(["decide", "--sequent", seq]) == 2
    assert "cyclic" in capsys.readouterr().err


def test_sequent_input(capsys, tmp_path):
    seq = {"rels": [["x0", "R", "x1"]], "left": [["x0", "[b]p"]], "right": [["x1", "p"]]}
    assert main(["decide", "--sequent", json.dumps(seq)]) == 0
    path = tmp_path / "s.json"
    path.write_text(json.dumps(seq))
    assert main(["decide", "--sequent", str(path)]) == 0
    assert main(["decide", "--sequent", "{\"rels\": 5}"]) == 2
    capsys.readouterr()


def test_check_rejects_tampered_proof(capsys, tmp_path):
    out = tmp_path / "proof.json"
    main(["decide", "[b]([b]p->p)->[b]p", "--proof-out", str(out)])
    obj = json.loads(out.read_text())
    obj["back_edges"][0]["pivot"] = obj["back_edges"][0]["pivot"][::-1]
    out.write_text(json.dumps(obj))
    assert main(["check", "--proof", str(out)]) == 1
    assert capsys.readouterr().out.startswith("PROVED\nREJECTED")


def test_budget_is_internal_error(capsys):
    assert main(["decide", "[b]([b]p->p)->[b]p", "--max-steps", "0"]) == 3
    assert "internal error" in capsys.readouterr().err


def test_trace_goes_to_stderr(capsys):
    assert main(["decide", "p -> p", "--trace"]) == 0
    captured = capsys.readouterr()
    assert captured.out == "PROVED\n"
    assert all(json.loads(line)["event"] for line in captured.err.splitlines())


def test_corpus_command(capsys):
    assert main(["corpus"]) == 0
    out = capsys.readouterr().out
    assert out.rstrip().endswith("0 mismatch(es)")
    assert "MISMATCH" not in out


def test_sweep_command(capsys):
    assert main(["sweep", "--atoms", "p", "--max-nodes", "4", "--oracle-bound", "2"]) == 1
    assert "0 mismatch(es)" in capsys.readouterr().out


def test_outputs_are_byte_identical(tmp_path):
    for name in ("a", "b"):
        main(["decide", "[b]([b]p->p)->[d][b]p", "--proof-out", str(tmp_path / f"{name}.json")])
        main(["decide", "[b]p->[d]p", "--model-out", str(tmp_path / f"{name}m.json"), "--dot"])
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "am.json").read_bytes() == (tmp_path / "bm.json").read_bytes()
    assert (tmp_path / "am.dot").read_bytes() == (tmp_path / "bm.dot").read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "csprove", "decide", "[b]p->[b][b]p"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert proc.stdout == "PROVED\n"
