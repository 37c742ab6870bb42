import csv
import json
import os

import pytest

from infdl.analysis import analyze
from infdl.cli import main
from infdl.parser import parse_program

from conftest import FIXDIR

EXSTRAT = os.path.join(FIXDIR, "exstrat.idl")
EXALT = os.path.join(FIXDIR, "exalt.idl")
STRUC3 = os.path.join(FIXDIR, "struc3.edb")
STRUC2 = os.path.join(FIXDIR, "struc2.edb")
KRIPKE = os.path.join(FIXDIR, "struc2.kripke")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eval_with_stats(capsys):
    code, out, err = run(capsys, "eval", EXSTRAT, STRUC3, "--stats")
    assert code == 0
    assert "phi = {1, 2, 3}" in out
    assert "psi = {1, 2, 3}" in out
    assert "productiveRounds: 6" in out


def test_eval_json_schema(capsys):
    code, out, _ = run(capsys, "eval", EXSTRAT, STRUC3, "--json")
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"answers", "stats", "trace"}
    assert payload["answers"] == {"phi": ["1", "2", "3"], "psi": ["1", "2", "3"]}
    assert payload["stats"]["productiveRounds"] == 6
    assert payload["trace"] is None


def test_eval_json_trace(capsys):
    code, out, _ = run(capsys, "eval", EXSTRAT, STRUC3, "--json", "--trace")
    assert code == 0
    trace = json.loads(out)["trace"]
    assert trace[0] == {"phi": [], "psi": []}
    assert trace[-1] == {"phi": ["1", "2", "3"], "psi": ["1", "2", "3"]}
    assert len(trace) == 7


def test_eval_query_restriction(capsys):
    code, out, _ = run(capsys, "eval", EXSTRAT, STRUC3,
                       "--query", "psi", "--json")
    assert code == 0
    assert list(json.loads(out)["answers"]) == ["psi"]


def test_eval_unknown_query(capsys):
    code, _, err = run(capsys, "eval", EXSTRAT, STRUC3, "--query", "zeta")
    assert code == 1
    assert "zeta" in err


def test_eval_literal_mode_flag(capsys):
    code, out, _ = run(capsys, "eval", EXALT, STRUC2,
                       "--literal-bounds", "--stats")
    assert code == 0
    assert "tApplications: 16" in out


def test_eval_mode_flags_conflict(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["eval", EXSTRAT, STRUC3, "--literal-bounds", "--early-exit"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_eval_missing_file(capsys):
    code, _, err = run(capsys, "eval", "/nonexistent.idl", STRUC3)
    assert code == 1
    assert err


def test_eval_rejects_parameters(capsys, tmp_path):
    path = tmp_path / "param.idl"
    path.write_text(".param g/1\nphi(X) <- g(X).\n")
    code, _, err = run(capsys, "eval", str(path), STRUC3)
    assert code == 1
    assert "parameter" in err


def test_check_alternating_fixture(capsys):
    code, out, _ = run(capsys, "check", EXALT)
    assert code == 0
    assert "stratified: false" in out
    assert "k: 2" in out
    assert "scc 1: lfp{theta1} gfp{phi2}" in out


def test_check_json(capsys):
    code, out, _ = run(capsys, "check", EXALT, "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["stratified"] is False
    assert payload["k"] == 2
    assert payload["sccs"] == [["theta1", "phi2"]]
    assert payload["blocks"] == [[
        {"polarity": "lfp", "idbs": ["theta1"]},
        {"polarity": "gfp", "idbs": ["phi2"]},
    ]]
    assert payload["diagnostics"] == []


def test_check_reports_diagnostics(capsys, tmp_path):
    path = tmp_path / "bad.idl"
    path.write_text("phi(X) <- phi(X).\n")
    code, out, _ = run(capsys, "check", str(path))
    assert code == 1
    assert "self-recursive" in out


def test_check_missing_file(capsys):
    code, _, err = run(capsys, "check", "/nonexistent.idl")
    assert code == 1
    assert err


def test_oracle_matches_eval(capsys):
    code, oracle_out, _ = run(capsys, "oracle", EXSTRAT, STRUC3)
    assert code == 0
    code, eval_out, _ = run(capsys, "eval", EXSTRAT, STRUC3)
    assert code == 0
    assert oracle_out == eval_out


def test_oracle_alternating(capsys):
    code, out, _ = run(capsys, "oracle", EXALT, STRUC2)
    assert code == 0
    assert "phi2 = {}" in out
    assert "theta1 = {}" in out


def test_mc_reachability(capsys):
    code, out, _ = run(capsys, "mc", KRIPKE, "--formula", "EF p")
    assert code == 0
    assert out.strip() == "{1, 2, 3}"


def test_mc_state_membership(capsys):
    code, out, _ = run(capsys, "mc", KRIPKE, "--formula", "EF p",
                       "--state", "3")
    assert code == 0
    assert out.strip() == "true"


def test_mc_state_json(capsys):
    code, out, _ = run(capsys, "mc", KRIPKE, "--formula", "p",
                       "--state", "3", "--json")
    assert code == 0
    assert json.loads(out) == {"formula": "p", "state": "3", "holds": True}


def test_mc_unknown_state(capsys):
    code, _, err = run(capsys, "mc", KRIPKE, "--formula", "p", "--state", "9")
    assert code == 1
    assert "unknown state" in err


def test_mc_universal_needs_functional(capsys):
    code, _, err = run(capsys, "mc", KRIPKE, "--formula", "AX p")
    assert code == 1
    assert "functional" in err
    code, out, _ = run(capsys, "mc", KRIPKE, "--formula",
                       "A(true U A(false W p))", "--functional")
    assert code == 0
    assert out.strip() == "{}"


def test_mc_emit_datalog_reparses(capsys):
    code, out, _ = run(capsys, "mc", KRIPKE, "--formula", "EF p",
                       "--emit-datalog")
    assert code == 0
    first, rest = out.split("\n", 1)
    assert first == "% goal: V0@0"
    prog = parse_program(rest)
    assert analyze(prog).stratified
    assert "V0@0" in prog.idbs


def test_mc_emit_datalog_json(capsys):
    code, out, _ = run(capsys, "mc", KRIPKE, "--formula", "EF p",
                       "--emit-datalog", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["goal"] == "V0@0"
    parse_program(payload["program"])


def test_mc_formula_syntax_error(capsys):
    code, _, err = run(capsys, "mc", KRIPKE, "--formula", "mu X.")
    assert code == 1
    assert err


def test_bench_writes_report(capsys, tmp_path):
    code, out, _ = run(capsys, "bench", "--n", "2", "--k", "2", "--idbs", "2",
                       "--trials", "3", "--seed", "1", "--out", str(tmp_path))
    assert code == 0
    assert "wrote" in out
    csv_path = tmp_path / "bench.csv"
    assert csv_path.exists()
    assert (tmp_path / "bench.png").exists()
    with open(csv_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["trial", "n", "k", "idbs", "blocks", "measured",
                       "bound", "ratio", "oracle"]
    assert len(rows) == 4


def test_bench_json(capsys, tmp_path):
    code, out, _ = run(capsys, "bench", "--trials", "2", "--n", "2",
                       "--out", str(tmp_path), "--json")
    assert code == 0
    payload = json.loads(out)
    assert len(payload) == 2
    assert all(r["measured"] <= r["bound"] for r in payload)


def test_bench_rejects_zero_trials(capsys, tmp_path):
    code, _, err = run(capsys, "bench", "--trials", "0", "--out", str(tmp_path))
    assert code == 2
    assert "usage error" in err


def test_no_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    capsys.readouterr()
