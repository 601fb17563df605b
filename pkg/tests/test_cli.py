import json

import pytest

from lib.derivations import derivation_to_json
from lmu import (
    EXIT_FUEL,
    EXIT_MALFORMED,
    EXIT_NEGATIVE,
    EXIT_OK,
    load_corpus,
    run,
)
from tests.conftest import OMEGA_TEXT
from tests.test_derivations import erased_argument_derivation, identity_derivation


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"state": {"dir": str(tmp_path / "state")}, "output": {"color": False}}))
    return str(path)


def test_parse_prints_the_canonical_form(capsys) -> None:
    assert run(["parse", "-e", "λx.  x"]) == EXIT_OK
    assert capsys.readouterr().out == "\\x.x\n"


def test_parse_json_lists_redexes(capsys) -> None:
    assert run(["parse", "-e", "(\\x.x) ((\\y.y) z)", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["free_vars"] == ["z"]
    assert [r["path"] for r in data["redexes"]] == ["root", "arg"]
    assert data["is_hnf"] is False


def test_malformed_term_exits_2(capsys) -> None:
    assert run(["parse", "-e", "(\\x."]) == EXIT_MALFORMED
    assert "error" in capsys.readouterr().err


def test_unknown_command_exits_2() -> None:
    assert run(["frobnicate"]) == EXIT_MALFORMED


def test_reduce_prints_trace_then_result(capsys) -> None:
    assert run(["reduce", "-e", "(mu b.[b] x) y"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["1 MuNamed @root ⟶ mu b'.[b'] x y", "mu b'.[b'] x y"]


def test_reduce_out_of_fuel_exits_3(capsys) -> None:
    assert run(["reduce", "-e", OMEGA_TEXT, "--fuel", "5", "--format", "json"]) == EXIT_FUEL
    data = json.loads(capsys.readouterr().out)
    assert data["status"] == "FuelExhausted"
    assert len(data["steps"]) == 5


def test_bad_bounds_exit_2() -> None:
    assert run(["reduce", "-e", "x", "--fuel", "-1"]) == EXIT_MALFORMED
    assert run(["reduce", "-e", "x", "--strategy", "random"]) == EXIT_MALFORMED


def test_random_strategy_with_seed(capsys) -> None:
    assert run(["reduce", "-e", "(\\x.x) ((\\y.y) z)", "--strategy", "random", "--seed", "3"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[-1] == "z"


def test_subtype(capsys) -> None:
    assert run(["subtype", "-t", "'p & 'q", "-t", "'p"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "true"
    assert run(["subtype", "-t", "'p", "-t", "'p & 'q"]) == EXIT_NEGATIVE
    assert run(["subtype", "-t", "'p * 'q", "-t", "'p"]) == EXIT_OK
    assert run(["subtype", "-t", "'p"]) == EXIT_MALFORMED


def test_join(capsys) -> None:
    assert run(["join", "-e", "x bot", "-e", "bot y"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "x y"
    assert run(["join", "-e", "x", "-e", "y"]) == EXIT_NEGATIVE
    assert capsys.readouterr().out.strip() == "undefined"


def test_approx(capsys) -> None:
    assert run(["approx", "-e", f"x ({OMEGA_TEXT})"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["x bot", "join: x bot"]


def test_classify_json(capsys) -> None:
    assert run(["classify", "-e", "mu a.[b] mu g.[d] x", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["hnf_by_reduction"] is True
    assert data["sn_by_graph"] == "SN"
    assert data["disagreements"] == []


def test_check_accepts_and_rejects(tmp_path, capsys) -> None:
    good = tmp_path / "good.json"
    good.write_text(json.dumps(derivation_to_json(identity_derivation())))
    assert run(["check", str(good)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "ok"

    erased = tmp_path / "erased.json"
    erased.write_text(json.dumps(derivation_to_json(erased_argument_derivation())))
    assert run(["check", str(erased)]) == EXIT_OK
    capsys.readouterr()
    assert run(["check", str(erased), "--system", "sn", "--format", "json"]) == EXIT_NEGATIVE
    data = json.loads(capsys.readouterr().out)
    assert data["ok"] is False
    assert data["errors"][0]["path"] == []


def test_check_malformed_file(tmp_path) -> None:
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["check", str(bad)]) == EXIT_MALFORMED
    assert run(["check", str(tmp_path / "missing.json")]) == EXIT_MALFORMED


def test_infer_json(capsys) -> None:
    assert run(["infer", "-e", "x", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data[0]["type"] == "w"
    assert data[1] == {"ctx": {"x": "(O)->'p"}, "type": "(O)->'p", "nctx": {}}
    assert {"ctx": {"x": "(O)->'q"}, "type": "(O)->'q", "nctx": {}} in data


# ------------- corpus -------------


def test_load_corpus_reads_annotations(tmp_path) -> None:
    corpus = tmp_path / "terms.txt"
    corpus.write_text("# header\n\nx   # hnf=true sn=SN\n\\x.x\n")
    entries = load_corpus(str(corpus))
    assert [e.text for e in entries] == ["x", "\\x.x"]
    assert entries[0].expected == {"hnf": "true", "sn": "SN"}
    assert entries[0].line == 3


def test_corpus_run_matches_annotations(tmp_path, config_file, capsys) -> None:
    corpus = tmp_path / "terms.txt"
    corpus.write_text(f"x  # hnf=true nf=true sn=SN\n{OMEGA_TEXT}  # hnf=false nf=false sn=NotSN\n")
    assert run(["corpus", "run", str(corpus), "--config", config_file]) == EXIT_OK
    out = capsys.readouterr().out
    assert "disagreements: 0" in out
    saved = json.loads((tmp_path / "state" / "last_corpus_run.json").read_text())
    assert set(saved["verdicts"]) == {"x", OMEGA_TEXT}


def test_corpus_run_reports_mismatches(tmp_path, config_file, capsys) -> None:
    corpus = tmp_path / "terms.txt"
    corpus.write_text("x  # hnf=false\nmu a.[  # broken\n")
    assert run(["corpus", "run", str(corpus), "--config", config_file, "--format", "json"]) == EXIT_NEGATIVE
    data = json.loads(capsys.readouterr().out)
    assert data["mismatches"] == 1
    assert data["errors"] == 1
    assert data["disagreements"] == 0
