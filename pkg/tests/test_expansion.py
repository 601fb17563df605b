import pytest

from lib.derivations import Rule, System, check_derivation, node
from lib.expansion import expand_at
from lib.inference import synthesize
from lib.properties import RULE_EXAMPLES
from lib.reduction import contract
from lib.strict_types import EMPTY_CTX, OMEGA, OMEGA_CONT, BasicType, Context, inter
from lib.syntax import parse_term
from lib.terms import LmuError, Var

P = BasicType(OMEGA_CONT, "p")


def axiom(name: str):
    return node(Rule.AX, Context.of({name: inter(P)}), Var(name), P, EMPTY_CTX)


def strong_typer(operand):
    return synthesize(operand, "strong")


def test_beta_expansion_collects_the_operand_type() -> None:
    redex = parse_term("(\\x.x) y")
    d = expand_at(axiom("y"), redex, ())
    assert d.term == redex
    assert d.type == inter(P)
    assert d.vctx == Context.of({"y": inter(P)})
    assert check_derivation(d).ok


def test_erased_operand_is_omega_in_s() -> None:
    redex = parse_term("(\\x.y) z")
    d = expand_at(axiom("y"), redex, ())
    assert check_derivation(d).ok
    assert d.premises[1].type == OMEGA


def test_erased_operand_needs_its_own_derivation_in_sn() -> None:
    redex = parse_term("(\\x.y) z")
    assert expand_at(axiom("y"), redex, (), System.SN) is None
    d = expand_at(axiom("y"), redex, (), System.SN, strong_typer)
    assert d is not None
    assert "z" in d.vctx
    assert check_derivation(d, System.SN).ok


def test_expansion_below_the_root() -> None:
    term = parse_term("w ((\\x.x) y)")
    reduct = contract(term, ("arg",))
    d = synthesize(reduct, "normal")
    expanded = expand_at(d, term, ("arg",))
    assert expanded.term == term
    assert expanded.type == d.type
    assert check_derivation(expanded).ok


def test_expansion_rejects_a_foreign_derivation() -> None:
    with pytest.raises(LmuError):
        expand_at(axiom("z"), parse_term("(\\x.x) y"), ())


@pytest.mark.parametrize("source", [source for source, _ in RULE_EXAMPLES])
@pytest.mark.parametrize("system", [System.S, System.SN])
def test_every_rule_expands_to_a_valid_derivation(source, system) -> None:
    redex = parse_term(source)
    typer = strong_typer if system == System.SN else None
    mode = "strong" if system == System.SN else "normal"
    d = synthesize(contract(redex, ()), mode)
    expanded = expand_at(d, redex, (), system, typer)
    assert expanded is not None
    assert expanded.term == redex
    assert expanded.type == d.type
    assert check_derivation(expanded, system).ok
