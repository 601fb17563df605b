from pathlib import Path

import pytest

from lib.derivations import System, check_derivation, derivation_width
from lib.inference import (
    SubjectReduction,
    check_subject_reduction,
    classify,
    derive,
    infer,
    synthesize,
)
from lib.reduction import RedexKind, SNStatus
from lib.report import format_typing
from lib.strict_types import EMPTY_CTX, Context, omega_free
from lib.syntax import format_type, parse_term, parse_type
from lib.terms import LmuError
from tests.conftest import OMEGA_TEXT

CORPUS = Path(__file__).resolve().parent.parent / "corpus" / "terms.txt"


def test_infer_variable() -> None:
    typings = infer(parse_term("x"), System.S, depth=3, width=2)
    assert typings[0].type.is_omega
    lines = [format_typing(t) for t in typings]
    assert lines[1] == "{x: (O)->'p} |- x : (O)->'p | {}"
    assert "{x: (O)->'q} |- x : (O)->'q | {}" in lines
    assert "{x: (O)->'p & (O)->'q} |- x : (O)->'p & (O)->'q | {}" in lines
    assert all(check_derivation(t.derivation).ok for t in typings)


def test_infer_stays_within_the_width_bound() -> None:
    typings = infer(parse_term("x"), System.S, depth=3, width=1)
    assert all(derivation_width(t.derivation) <= 1 for t in typings)
    assert not any(len(t.type.conjuncts) > 1 for t in typings)


def test_infer_types_an_unused_binder_with_any_constant() -> None:
    types = [format_type(t.type) for t in infer(parse_term("\\x.\\y.x"), System.SN, depth=3, width=2)]
    assert "((O)->'p * (O)->'q * O)->'p" in types


def test_strong_typings_of_omega_are_not_found_by_enumeration() -> None:
    assert infer(parse_term(OMEGA_TEXT), System.SN, depth=4, width=2, fuel=2000) == []


def test_infer_identity_under_sn() -> None:
    typings = infer(parse_term("\\x.x"), System.SN, depth=3, width=1)
    assert "((O)->'p * O)->'p" in [format_type(t.type) for t in typings]
    assert all(check_derivation(t.derivation, System.SN).ok for t in typings)


def test_infer_respects_the_height_bound() -> None:
    term = parse_term("\\x.\\y.x y")
    assert all(t.type.is_omega for t in infer(term, System.S, depth=1))


def test_nothing_strongly_typed_for_omega() -> None:
    assert infer(parse_term(OMEGA_TEXT), System.SN) == []
    assert all(t.type.is_omega for t in infer(parse_term(OMEGA_TEXT), System.S))


def test_head_mode_types_a_head_normal_form_with_omega_arguments() -> None:
    d = synthesize(parse_term(f"x ({OMEGA_TEXT})"), "head")
    assert d is not None
    assert check_derivation(d).ok
    assert not omega_free(d.vctx)
    assert synthesize(parse_term(f"x ({OMEGA_TEXT})"), "normal") is None


def test_mu_terms_are_typed() -> None:
    for text in ("mu a.[a] x", "mu a.[b] mu g.[d] x", "(mu b.[b] x) y"):
        d = synthesize(parse_term(text), "strong")
        assert d is not None, text
        assert check_derivation(d, System.SN).ok, text


def test_derive_checks_a_given_goal() -> None:
    d = derive(parse_term("\\x.x"), EMPTY_CTX, parse_type("('p)->'p"), EMPTY_CTX)
    assert d is not None
    assert check_derivation(d).ok
    strong = Context.of({"x": parse_type("'p & 'q")})
    assert derive(parse_term("x"), strong, parse_type("'q"), EMPTY_CTX) is not None
    assert derive(parse_term("x"), Context.of({"x": parse_type("'p")}), parse_type("'q"), EMPTY_CTX) is None


def test_derive_through_a_redex_and_a_mu() -> None:
    ctx = Context.of({"y": parse_type("'p")})
    assert derive(parse_term("(\\x.x) y"), ctx, parse_type("'p"), EMPTY_CTX) is not None
    ctx = Context.of({"x": parse_type("'p")})
    assert derive(parse_term("mu a.[a] x"), ctx, parse_type("'p"), EMPTY_CTX) is not None


def test_subject_reduction() -> None:
    d = synthesize(parse_term("(\\x.x) y"), "normal")
    result = check_subject_reduction(d, ((), RedexKind.BETA))
    assert result.status == SubjectReduction.OK
    assert result.derivation.type == d.type
    assert result.derivation.vctx == d.vctx


def test_subject_reduction_rejects_a_step_of_the_wrong_kind() -> None:
    d = synthesize(parse_term("(\\x.x) y"), "normal")
    with pytest.raises(LmuError, match="MuNamed"):
        check_subject_reduction(d, ((), RedexKind.MU_NAMED))
    with pytest.raises(LmuError, match="no redex"):
        check_subject_reduction(d, (("arg",), RedexKind.BETA))
    with pytest.raises(LmuError):
        check_subject_reduction(d, (("body",), RedexKind.BETA))


def test_subject_reduction_follows_a_mu_step() -> None:
    term = parse_term("(mu b.[b] x) y")
    d = synthesize(term, "strong")
    result = check_subject_reduction(d, ((), RedexKind.MU_NAMED))
    if result.status == SubjectReduction.OK:
        assert check_derivation(result.derivation).ok
        assert result.derivation.type == d.type
    else:
        assert result.derivation is None


def test_classify_a_variable() -> None:
    report = classify(parse_term("x"))
    assert report.hnf_by_reduction and report.nf_by_reduction
    assert report.sn_by_graph.status == SNStatus.SN
    assert report.typeable_S_nonomega and report.typeable_omega_free and report.typeable_SN
    assert report.disagreements == ()


def test_classify_omega() -> None:
    report = classify(parse_term(OMEGA_TEXT))
    assert report.hnf_by_reduction is False
    assert report.nf_by_reduction is False
    assert report.sn_by_graph.status == SNStatus.NOT_SN
    assert report.typeable_S_nonomega is None
    assert report.typeable_SN is None
    assert report.disagreements == ()


def test_classify_normalising_but_not_strongly() -> None:
    report = classify(parse_term(f"(\\x.\\y.y) ({OMEGA_TEXT})"))
    assert report.nf_by_reduction is True
    assert report.sn_by_graph.status == SNStatus.NOT_SN
    assert report.typeable_omega_free is True
    assert report.typeable_SN is None
    assert report.as_dict()["sn_by_graph"] == "NotSN"


def _corpus_lines() -> list[str]:
    lines = []
    for raw in CORPUS.read_text().splitlines():
        text = raw.partition("#")[0].strip()
        if text:
            lines.append(text)
    return lines


@pytest.mark.parametrize("text", _corpus_lines())
def test_corpus_has_no_disagreements(text) -> None:
    assert classify(parse_term(text)).disagreements == ()
