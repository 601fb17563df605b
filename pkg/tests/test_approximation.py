import pytest
from hypothesis import given, settings

from lib.approximation import (
    approx_equivalent,
    approximants,
    compatible,
    direct_approx,
    is_approximant,
    join,
    join_all,
    semantics,
    truncate,
)
from lib.properties import check_approx_preserved, check_join_laws, check_join_lub
from lib.syntax import parse_term
from lib.terms import BOT
from tests.conftest import OMEGA_TEXT, impure_terms, small_terms


@pytest.mark.parametrize(
    "text, expected",
    [
        ("bot", True),
        ("x bot", True),
        ("\\x.x bot", True),
        ("mu a.[b] x bot", True),
        ("\\x.bot", False),
        ("mu a.[a] bot", False),
        ("(\\x.x) y", False),
        ("bot x", False),
        ("mu a.[b] mu g.[a] x", False),
    ],
)
def test_approximant_grammar(text, expected) -> None:
    assert is_approximant(parse_term(text)) is expected


@pytest.mark.parametrize(
    "text, expected",
    [
        ("x ((\\y.y) z)", "x bot"),
        ("\\x.(\\y.y) x", "bot"),
        ("\\x.x ((\\y.y) x) z", "\\x.x bot z"),
        ("mu a.[b] mu g.[a] x", "bot"),
        ("mu a.[a] x ((\\y.y) x)", "mu a.[a] x bot"),
    ],
)
def test_truncate(text, expected) -> None:
    assert truncate(parse_term(text)) == parse_term(expected)


def test_direct_approximation_order() -> None:
    assert direct_approx(parse_term("x bot"), parse_term("x y"))
    assert not direct_approx(parse_term("x y"), parse_term("x bot"))
    assert not direct_approx(parse_term("mu a.[a] x"), parse_term("mu a.[b] x"))
    assert direct_approx(BOT, parse_term(OMEGA_TEXT))


def test_join() -> None:
    assert join(parse_term("x bot"), parse_term("bot y")) == parse_term("x y")
    assert join(parse_term("x"), parse_term("y")) is None
    assert join(parse_term("mu a.[a] bot"), parse_term("mu a.[b] x")) is None
    assert not compatible(parse_term("\\x.x"), parse_term("x"))
    assert join_all([]) == BOT


def test_approximants_of_a_normalising_term() -> None:
    found = approximants(parse_term("(\\x.x) y"))
    assert found.maximal == (parse_term("y"),)
    assert found.complete


def test_approximants_of_diverging_terms() -> None:
    assert approximants(parse_term(OMEGA_TEXT)).maximal == (BOT,)
    assert approximants(parse_term(f"x ({OMEGA_TEXT})")).maximal == (parse_term("x bot"),)


def test_semantics_and_equivalence() -> None:
    term = parse_term(f"(\\x.\\y.y) ({OMEGA_TEXT})")
    assert semantics(term) == parse_term("\\y.y")
    assert approx_equivalent(term, parse_term("\\y.y"))
    assert not approx_equivalent(term, parse_term("\\y.y y"))


@settings(deadline=None)
@given(impure_terms)
def test_truncation_is_an_approximant_below_the_term(term) -> None:
    cut = truncate(term)
    assert is_approximant(cut)
    assert direct_approx(cut, term)


@settings(deadline=None, max_examples=30)
@given(small_terms)
def test_approximants_are_pairwise_compatible(term) -> None:
    assert join_all(list(approximants(term, 50).maximal)) is not None


@settings(deadline=None, max_examples=40)
@given(impure_terms)
def test_join_of_terms_below_a_term_is_their_least_upper_bound(term) -> None:
    assert check_join_lub(term)["ok"] is True


@settings(deadline=None, max_examples=40)
@given(impure_terms, impure_terms)
def test_join_laws(term, other) -> None:
    assert check_join_laws(term, other)["ok"] is True


def test_join_laws_across_incompatible_terms() -> None:
    left, right = parse_term("x bot"), parse_term("y z")
    assert join(left, right) is None and join(right, left) is None
    assert check_join_laws(left, right)["ok"] is True


@settings(deadline=None, max_examples=30)
@given(small_terms)
def test_truncation_stays_below_every_reduct(term) -> None:
    assert check_approx_preserved(term, 40)["ok"] is True


def test_truncation_stays_below_the_reducts_of_a_diverging_argument() -> None:
    result = check_approx_preserved(parse_term(f"x ({OMEGA_TEXT}) ((\\y.y) z)"), 20)
    assert result["ok"] is True
