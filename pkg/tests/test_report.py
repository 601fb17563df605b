import pandas as pd

from lib.inference import classify, infer
from lib.reduction import normalize
from lib.report import (
    classify_rows,
    classify_table,
    format_trace,
    styled,
    summarize_results,
    trace_to_json,
    typing_to_json,
    verdict_text,
)
from lib.syntax import parse_term
from tests.conftest import OMEGA_TEXT


def test_verdict_text_and_style() -> None:
    assert verdict_text(True) == "true"
    assert verdict_text(None, "not found") == "not found"
    assert styled("x", True, color=False) == "x"
    assert styled("x", False) == "\033[31mx\033[0m"


def test_trace_lines() -> None:
    outcome = normalize(parse_term("(\\x.x) ((\\y.y) z)"), "lor", 10)
    assert format_trace(outcome) == ["1 Beta @root ⟶ (\\y.y) z", "2 Beta @root ⟶ z"]
    data = trace_to_json(outcome)
    assert data["status"] == "Normal"
    assert data["steps"][1] == {"step": 2, "kind": "Beta", "path": "root", "term": "z"}


def test_failed_typing_search_reads_not_found() -> None:
    rows = dict(classify_rows(classify(parse_term(OMEGA_TEXT))))
    assert rows["SN typing"] == "not found"
    assert rows["HNF by reduction"] == "false"
    assert rows["SN by graph"] == "NotSN"


def test_classify_table_starts_with_the_term() -> None:
    table = classify_table(classify(parse_term("x")))
    assert table.splitlines()[0] == "x"
    assert "DISAGREEMENT" not in table


def test_typing_json_with_derivation() -> None:
    typing = infer(parse_term("x"), "SN")[0]
    data = typing_to_json(typing, with_derivation=True)
    assert data["derivation"]["rule"] == "Ax"


def test_summary_counts_outcomes() -> None:
    frame = pd.DataFrame(
        [
            {"property": "a", "subject": "x", "ok": True, "detail": ""},
            {"property": "a", "subject": "y", "ok": None, "detail": ""},
            {"property": "b", "subject": "x", "ok": False, "detail": ""},
        ]
    )
    summary = summarize_results(frame).set_index("property")
    assert summary.loc["a", "passed"] == 1
    assert summary.loc["a", "inconclusive"] == 1
    assert summary.loc["b", "failed"] == 1
