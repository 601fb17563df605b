import pytest
from hypothesis import given, settings

from lib.properties import RULE_EXAMPLES, check_confluence
from lib.reduction import (
    RedexKind,
    ReductionStatus,
    SNStatus,
    Strategy,
    contract,
    graph_leaves,
    head_normalize,
    is_hnf,
    is_nf,
    is_sn,
    normalize,
    reduction_graph,
    redexes,
    replay,
    step_lor,
)
from lib.syntax import parse_term, pretty
from lib.terms import LmuError, NotARedexError
from tests.conftest import OMEGA_TEXT, small_terms


@pytest.mark.parametrize(
    "text, kind",
    [
        ("(\\x.x) y", RedexKind.BETA),
        ("(mu a.[a] x) y", RedexKind.MU_NAMED),
        ("(mu a.[b] x) y", RedexKind.MU_OTHER),
        ("mu a.[b] mu g.[d] x", RedexKind.REN),
    ],
)
def test_redex_kinds(text, kind) -> None:
    assert redexes(parse_term(text)) == [((), kind)]


def test_redexes_are_listed_outermost_first() -> None:
    found = redexes(parse_term("(\\x.x) ((\\y.y) z)"))
    assert [p for p, _ in found] == [(), ("arg",)]


@pytest.mark.parametrize("source, expected", RULE_EXAMPLES)
def test_single_step_rules(source, expected) -> None:
    assert contract(parse_term(source), ()) == parse_term(expected)


def test_named_mu_step_primes_the_new_binder() -> None:
    reduct = contract(parse_term("(mu b.[b] x) y"), ())
    assert pretty(reduct) == "mu b'.[b'] x y"


def test_named_mu_step_rewires_inner_sends() -> None:
    reduct = contract(parse_term("(mu a.[a] \\x.mu b.[a] x) y"), ())
    assert reduct == parse_term("mu a.[a] (\\x.mu b.[a] x y) y")


def test_ren_to_the_outer_binder() -> None:
    assert contract(parse_term("mu a.[a] mu g.[a] x"), ()) == parse_term("mu a.[a] x")


def test_contract_without_redex_raises() -> None:
    with pytest.raises(NotARedexError):
        contract(parse_term("x y"), ())


def test_normalize_reaches_normal_form() -> None:
    outcome = normalize(parse_term("(\\x.x x) (\\y.y)"), "lor", 10)
    assert outcome.status == ReductionStatus.NORMAL
    assert outcome.final == parse_term("\\y.y")
    assert [s.kind for s in outcome.steps] == [RedexKind.BETA, RedexKind.BETA]


def test_normalize_runs_out_of_fuel() -> None:
    outcome = normalize(parse_term(OMEGA_TEXT), "lor", 10)
    assert outcome.status == ReductionStatus.FUEL_EXHAUSTED
    assert len(outcome.steps) == 10
    assert outcome.final == parse_term(OMEGA_TEXT)


def test_zero_fuel_on_a_normal_form() -> None:
    outcome = normalize(parse_term("x"), "lor", 0)
    assert outcome.status == ReductionStatus.NORMAL
    assert outcome.steps == ()


def test_random_strategy_needs_a_seed() -> None:
    with pytest.raises(LmuError):
        normalize(parse_term("x"), Strategy.RANDOM, 10)


def test_lor_avoids_a_diverging_argument() -> None:
    term = parse_term(f"(\\x.\\y.y) ({OMEGA_TEXT})")
    assert normalize(term, "lor", 5).final == parse_term("\\y.y")
    assert normalize(term, "rightmost-innermost", 5).status == ReductionStatus.FUEL_EXHAUSTED


def test_step_lor_and_replay() -> None:
    term = parse_term("(\\x.x) ((\\y.y) z)")
    assert step_lor(term) == parse_term("(\\y.y) z")
    assert step_lor(parse_term("x")) is None
    outcome = normalize(term, "rightmost-innermost", 10)
    assert replay(term, outcome.steps) == outcome.final


@pytest.mark.parametrize(
    "text, hnf, nf",
    [
        ("x", True, True),
        ("\\x.x ((\\y.y) z)", True, False),
        ("(\\x.x) y", False, False),
        ("mu a.[b] x", True, True),
        ("mu a.[b] mu g.[d] x", False, False),
        ("\\x.mu a.[a] (\\y.y) x", False, False),
        ("bot", False, True),
    ],
)
def test_normal_form_predicates(text, hnf, nf) -> None:
    term = parse_term(text)
    assert is_hnf(term) is hnf
    assert is_nf(term) is nf


def test_head_normalize() -> None:
    hnf, steps = head_normalize(parse_term("(\\x.\\y.y x) z"), 10)
    assert hnf == parse_term("\\y.y z")
    assert len(steps) == 1
    assert head_normalize(parse_term(OMEGA_TEXT), 20)[0] is None


def test_reduction_graph_of_omega_is_a_loop() -> None:
    graph = reduction_graph(parse_term(OMEGA_TEXT), 10)
    assert graph.graph["complete"]
    assert graph.number_of_nodes() == 1
    assert graph_leaves(graph) == []


def test_sn_verdicts() -> None:
    assert is_sn(parse_term("(\\x.x) ((\\y.y) z)")).status == SNStatus.SN
    assert is_sn(parse_term("(\\x.x) ((\\y.y) z)")).max_path == 2
    assert is_sn(parse_term(OMEGA_TEXT)).status == SNStatus.NOT_SN
    assert is_sn(parse_term(f"(\\x.y) ({OMEGA_TEXT})")).status == SNStatus.NOT_SN
    assert is_sn(parse_term("(\\x.x x x) (\\x.x x x)"), 20).status == SNStatus.UNKNOWN


@settings(deadline=None, max_examples=40)
@given(small_terms)
def test_strategies_reach_the_same_normal_form(term) -> None:
    finals = []
    for strategy in (Strategy.LOR, Strategy.RIGHTMOST_INNERMOST):
        outcome = normalize(term, strategy, 200)
        if outcome.status == ReductionStatus.NORMAL:
            finals.append(outcome.final)
    assert len(set(finals)) <= 1


@settings(deadline=None, max_examples=40)
@given(small_terms)
def test_strongly_normalising_terms_normalise_under_every_strategy(term) -> None:
    verdict = is_sn(term, 100)
    if verdict.status != SNStatus.SN:
        return
    for strategy in Strategy:
        outcome = normalize(term, strategy, verdict.max_path, seed=0)
        assert outcome.status == ReductionStatus.NORMAL, strategy
        assert len(outcome.steps) <= verdict.max_path


@settings(deadline=None, max_examples=40)
@given(small_terms)
def test_one_step_reducts_rejoin(term) -> None:
    assert check_confluence(term, 60)["ok"] in (True, None)
