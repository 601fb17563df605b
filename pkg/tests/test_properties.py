import pytest

from lib.generate import enumerate_contexts, enumerate_types, make_rng, random_redex, random_terms
from lib.properties import (
    check_approximants_under_reduction,
    check_bottom_translation,
    check_confluence,
    check_hnf_truncation,
    check_inclusion_oracle,
    check_meets,
    check_rule_examples,
    check_truncation_maximal,
    run_properties,
)
from lib.reduction import RedexKind, redex_kind
from lib.strict_types import OMEGA, OMEGA_CONT, Context, inter_ctx
from lib.syntax import parse_cont, parse_term, parse_type
from tests.conftest import OMEGA_TEXT


def test_rule_examples_hold() -> None:
    assert all(row["ok"] for row in check_rule_examples())


@pytest.mark.parametrize(
    "text",
    ["(\\x.\\y.x) z ((\\y.y) w)", "(mu a.[a] x) ((\\y.y) z)", "mu a.[b] mu g.[a] (\\x.x) y"],
)
def test_small_graphs_are_confluent(text) -> None:
    assert check_confluence(parse_term(text))["ok"] is True


def test_confluence_is_inconclusive_on_unfinished_graphs() -> None:
    assert check_confluence(parse_term("(\\x.x x x) (\\x.x x x)"), 5)["ok"] is None


@pytest.mark.parametrize("text", ["x ((\\y.y) z) w", "\\x.mu a.[a] x (mu b.[b] y)", f"x ({OMEGA_TEXT})"])
def test_truncation_checks(text) -> None:
    term = parse_term(text)
    assert check_truncation_maximal(term)["ok"]
    assert check_hnf_truncation(term)["ok"]
    assert check_approximants_under_reduction(term)["ok"]


def test_inclusion_oracle_agrees_with_the_decision_procedure() -> None:
    samples = [
        parse_type("'p & 'q"),
        parse_type("('p & 'q)->'r & ('p)->'r"),
        parse_cont("'p & 'q * 'r"),
        parse_cont("w"),
    ]
    assert check_inclusion_oracle(samples)["ok"] is True


def test_type_enumeration_is_exhaustive_and_duplicate_free() -> None:
    inters, conts = enumerate_types(5)
    assert (len(inters), len(conts)) == (54, 20)
    assert len(set(inters)) == len(inters) and len(set(conts)) == len(conts)
    assert OMEGA in inters and OMEGA_CONT in conts
    assert parse_type("'p & 'q") in inters
    assert parse_type("('p & 'q)->'r") not in inters
    assert parse_cont("'p * 'q") in conts


def test_inclusion_oracle_agrees_on_every_small_type() -> None:
    inters, conts = enumerate_types(5)
    assert check_inclusion_oracle(inters + conts)["ok"] is True


def test_meets_are_greatest_lower_bounds() -> None:
    inters, conts = enumerate_types(5)
    small_inters, small_conts = enumerate_types(2)
    contexts = enumerate_contexts(small_inters)
    assert len(contexts) == 16
    result = check_meets(inters, conts, contexts, enumerate_contexts(small_conts, ("a", "b")))
    assert result["ok"] is True


def test_context_meet_keeps_every_subject() -> None:
    left = Context.of({"x": parse_type("'p")})
    right = Context.of({"x": parse_type("'q"), "y": parse_type("'p")})
    assert inter_ctx(left, right) == Context.of({"x": parse_type("'p & 'q"), "y": parse_type("'p")})


def test_bottom_translation_on_an_erasing_term() -> None:
    assert check_bottom_translation(parse_term(f"(\\x.\\y.y) ({OMEGA_TEXT})"))["ok"] is True


@pytest.mark.parametrize("kind", list(RedexKind))
def test_generated_redexes_have_the_requested_kind(kind) -> None:
    rng = make_rng(7)
    for _ in range(5):
        assert redex_kind(random_redex(rng, kind)) == kind


def test_generation_is_reproducible() -> None:
    assert random_terms(11, 5) == random_terms(11, 5)


def test_harness_frame() -> None:
    frame = run_properties(count=2, seed=1, size=4)
    assert list(frame.columns) == ["property", "subject", "ok", "detail"]
    assert frame[frame["property"] == "rule-example"]["ok"].all()
    assert frame[frame["property"] == "print-roundtrip"]["ok"].all()
