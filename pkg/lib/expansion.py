"""
Expansion Module
================
Subject expansion: given a derivation for the contractum of a redex,
build one for the redex itself with the same conclusion type.

The operand's type is collected from the places where the contractum
uses it; an unused operand is typed ω in S, and in SN by a separate
derivation supplied by the caller.
"""

import logging
from dataclasses import replace
from typing import Callable, Optional

from lib.derivations import (
    Derivation,
    FreshSupply,
    Judgement,
    Rule,
    System,
    Witness,
    basic_parts,
    derivation_identifiers,
    intersect,
    node,
    omega_node,
    recontext,
    restrict,
)
from lib.reduction import RedexKind, contract_redex, redex_kind
from lib.strict_types import (
    OMEGA_CONT,
    BasicType,
    Context,
    NameContext,
    VarContext,
    arrow,
    cons,
    single_basic,
)
from lib.syntax import pretty
from lib.terms import (
    App,
    Lam,
    LmuError,
    Mu,
    Position,
    PositionError,
    Term,
    Var,
    all_identifiers,
    format_position,
    open_lam,
    open_mu,
    subst_term,
)

logger = logging.getLogger(__name__)

OperandTyper = Callable[[Term], Optional[Derivation]]
Hole = Callable[[Term, Derivation], Optional[Derivation]]
Adjust = Callable[[Judgement], tuple[VarContext, NameContext]]


def _keep(j: Judgement) -> tuple[VarContext, NameContext]:
    return j.vctx, j.nctx


def _rebuild(source: Term, d: Derivation, hole: Hole, adjust: Adjust) -> Derivation:
    """Re-derive ``source`` along the rule tree of ``d``.

    ``hole`` may take over at any node; elsewhere rules are copied and
    contexts go through ``adjust``.
    """
    taken = hole(source, d)
    if taken is not None:
        return taken
    w = d.witness
    match d.rule:
        case Rule.INTER | Rule.INTER_BOT:
            premises = [_rebuild(source, p, hole, adjust) for p in d.premises]
        case Rule.AX:
            if source != d.term:
                raise LmuError(f"Derivation does not follow {pretty(source)}")
            premises = []
        case Rule.ABS if isinstance(source, Lam):
            premises = [_rebuild(open_lam(source, w.var), d.premises[0], hole, adjust)]
        case Rule.APP if isinstance(source, App):
            premises = [
                _rebuild(source.fun, d.premises[0], hole, adjust),
                _rebuild(source.arg, d.premises[1], hole, adjust),
            ]
        case Rule.MU | Rule.MU_PRIME if isinstance(source, Mu):
            premises = [_rebuild(open_mu(source, w.name)[1], d.premises[0], hole, adjust)]
        case _:
            raise LmuError(f"Derivation does not follow {pretty(source)}")
    vctx, nctx = adjust(d.conclusion)
    return replace(d, conclusion=Judgement(vctx, source, d.type, nctx), premises=tuple(premises))


def _operand_derivation(
    copies: list[Derivation],
    operand: Term,
    root: Judgement,
    system: System,
    operand_typer: Optional[OperandTyper],
) -> Optional[Derivation]:
    parts = [
        restrict(p, root.vctx.keys(), root.nctx.keys())
        for copy in copies
        for p in basic_parts(copy)
    ]
    if parts:
        return intersect(parts, operand, root.vctx, root.nctx)
    if system != System.SN:
        return omega_node(root.vctx, operand, root.nctx)
    if operand_typer is None:
        return None
    return operand_typer(operand)


def _attach_operand(built: Derivation, operand_d: Derivation) -> Derivation:
    """Meet the contexts of the operand's own derivation into the expansion."""
    root = built.conclusion
    if operand_d.vctx == root.vctx and operand_d.nctx == root.nctx:
        return built
    return recontext(built, operand_d.vctx, operand_d.nctx)


# ==============================================================================
# ONE REDEX
# ==============================================================================


def expand_beta(
    d: Derivation,
    redex: App,
    supply: FreshSupply,
    system: System = System.S,
    operand_typer: Optional[OperandTyper] = None,
) -> Optional[Derivation]:
    """(λx.M)N from a derivation of M[N/x]."""
    abstraction, operand = redex.fun, redex.arg
    root = d.conclusion
    target = single_basic(root.type)
    if target is None:
        raise LmuError("Expansion needs a basic conclusion")
    x = supply.fresh(abstraction.hint)
    body = open_lam(abstraction, x)
    if subst_term(body, x, operand) != d.term:
        raise LmuError("Derivation subject is not the contractum")

    copies: list[Derivation] = []

    def record(source: Term, current: Derivation) -> Optional[Derivation]:
        if source == Var(x):
            copies.append(current)
            return current
        return None

    _rebuild(body, d, record, _keep)
    operand_d = _operand_derivation(copies, operand, root, system, operand_typer)
    if operand_d is None:
        return None
    arg_type = operand_d.type
    if operand_d.vctx != root.vctx or operand_d.nctx != root.nctx:
        operand_d = recontext(operand_d, root.vctx, root.nctx)

    def bind(j: Judgement) -> tuple[VarContext, NameContext]:
        return j.vctx.extend(x, arg_type), j.nctx

    def axioms(source: Term, current: Derivation) -> Optional[Derivation]:
        if source != Var(x):
            return None
        vctx, nctx = bind(current.conclusion)
        if current.type.is_omega:
            return omega_node(vctx, source, nctx)
        leaves = [node(Rule.AX, vctx, source, b, nctx) for b in current.type.conjuncts]
        return intersect(leaves, source, vctx, nctx)

    premise = _rebuild(body, d, axioms, bind)
    lam_d = node(
        Rule.ABS, root.vctx, abstraction, arrow(arg_type, target.cont, target.head), root.nctx, [premise], Witness(var=x)
    )
    built = node(Rule.APP, root.vctx, redex, target, root.nctx, [lam_d, operand_d])
    return _attach_operand(built, operand_d)


def expand_mu(
    d: Derivation,
    redex: App,
    supply: FreshSupply,
    system: System = System.S,
    operand_typer: Optional[OperandTyper] = None,
) -> Optional[Derivation]:
    """(μβ.[·]M)N from a derivation of its μ-contractum."""
    abstraction, operand = redex.fun, redex.arg
    root = d.conclusion
    target = single_basic(root.type)
    if target is None or d.rule not in (Rule.MU, Rule.MU_PRIME):
        raise LmuError("Expansion needs a μ-typed contractum")
    gamma, premise = d.witness.name, d.premises[0]
    b = supply.fresh(abstraction.hint)
    sent_to, body = open_mu(abstraction, b)
    named = sent_to == b

    copies: list[Derivation] = []
    if named:
        if premise.rule != Rule.APP:
            raise LmuError("Contractum body must be typed by (App)")
        start, first_copy = premise.premises
        copies.append(first_copy)
        inner_cont = single_basic(start.type).cont
    else:
        start, inner_cont = premise, d.witness.cont

    def redirected(source: Term, current: Derivation) -> Optional[tuple[Term, Derivation, Derivation]]:
        if not isinstance(source, Mu) or current.rule not in (Rule.MU, Rule.MU_PRIME):
            return None
        to, inner = open_mu(source, current.witness.name)
        if to != b:
            return None
        app_d = current.premises[0]
        if app_d.rule != Rule.APP:
            raise LmuError("Redirected body must be typed by (App)")
        return inner, app_d.premises[0], app_d.premises[1]

    def record(source: Term, current: Derivation) -> Optional[Derivation]:
        found = redirected(source, current)
        if found is None:
            return None
        inner, fun_d, copy = found
        copies.append(copy)
        _rebuild(inner, fun_d, record, _keep)
        return current

    _rebuild(body, start, record, _keep)
    operand_d = _operand_derivation(copies, operand, root, system, operand_typer)
    if operand_d is None:
        return None
    arg_type = operand_d.type
    if operand_d.vctx != root.vctx or operand_d.nctx != root.nctx:
        operand_d = recontext(operand_d, root.vctx, root.nctx)
    bound_cont = cons(arg_type, target.cont)

    def rebind(j: Judgement) -> tuple[VarContext, NameContext]:
        return j.vctx, j.nctx.remove(gamma).extend(b, bound_cont)

    def resend(source: Term, current: Derivation) -> Optional[Derivation]:
        found = redirected(source, current)
        if found is None:
            return None
        inner, fun_d, _ = found
        vctx, nctx = rebind(current.conclusion)
        return node(
            Rule.MU_PRIME,
            vctx,
            source,
            current.type,
            nctx,
            [_rebuild(inner, fun_d, resend, rebind)],
            Witness(name=current.witness.name, cont=single_basic(fun_d.type).cont),
        )

    inner_d = _rebuild(body, start, resend, rebind)
    mu_d = node(
        Rule.MU if named else Rule.MU_PRIME,
        root.vctx,
        abstraction,
        arrow(arg_type, target.cont, target.head),
        root.nctx,
        [inner_d],
        Witness(name=b, cont=inner_cont),
    )
    built = node(Rule.APP, root.vctx, redex, target, root.nctx, [mu_d, operand_d])
    return _attach_operand(built, operand_d)


def expand_ren(d: Derivation, redex: Mu, supply: FreshSupply) -> Derivation:
    """μα.[β]μγ.[δ]M from a derivation of its renamed contractum."""
    root = d.conclusion
    if d.rule not in (Rule.MU, Rule.MU_PRIME):
        raise LmuError("Expansion needs a μ-typed contractum")
    alpha, premise, wanted = d.witness.name, d.premises[0], d.witness.cont
    beta, inner = open_mu(redex, alpha)
    premise_nctx = premise.nctx
    added = Context()
    if beta not in premise_nctx:
        added = Context.of({beta: OMEGA_CONT})
        premise_nctx = premise_nctx.extend(beta, OMEGA_CONT)
    sent = premise_nctx.get(beta)

    g = supply.fresh(inner.hint)
    delta, body = open_mu(inner, g)

    def bind(j: Judgement) -> tuple[VarContext, NameContext]:
        nctx = j.nctx if beta in j.nctx else j.nctx.extend(beta, OMEGA_CONT)
        return j.vctx, nctx.extend(g, sent)

    body_d = _rebuild(body, premise, lambda source, current: None, bind)
    inner_d = node(
        Rule.MU if delta == g else Rule.MU_PRIME,
        premise.vctx,
        inner,
        BasicType(sent, single_basic(root.type).head),
        premise_nctx,
        [body_d],
        Witness(name=g, cont=wanted),
    )
    outer_rule = Rule.MU if beta == alpha else Rule.MU_PRIME
    built = Derivation(outer_rule, replace(root, term=redex), (inner_d,), Witness(name=alpha, cont=sent))
    return recontext(built, Context(), added)


def expand_redex(
    d: Derivation,
    redex: Term,
    supply: FreshSupply,
    system: System = System.S,
    operand_typer: Optional[OperandTyper] = None,
) -> Optional[Derivation]:
    kind = redex_kind(redex)
    if kind is None:
        raise LmuError(f"Not a redex: {pretty(redex)}")
    if contract_redex(redex) != d.term:
        raise LmuError("Derivation subject is not the contractum")
    if d.rule == Rule.INTER and not d.premises:
        return omega_node(d.vctx, redex, d.nctx)
    if d.rule in (Rule.INTER, Rule.INTER_BOT):
        parts = [expand_redex(p, redex, supply, system, operand_typer) for p in d.premises]
        if any(p is None for p in parts):
            return None
        merged = parts[0]
        for other in parts[1:]:
            merged = recontext(merged, other.vctx, other.nctx)
        parts = [recontext(p, merged.vctx, merged.nctx) for p in parts]
        return replace(d, conclusion=Judgement(merged.vctx, redex, d.type, merged.nctx), premises=tuple(parts))
    logger.debug(f"Expanding {kind.value} redex {pretty(redex)}")
    match kind:
        case RedexKind.BETA:
            return expand_beta(d, redex, supply, system, operand_typer)
        case RedexKind.MU_NAMED | RedexKind.MU_OTHER:
            return expand_mu(d, redex, supply, system, operand_typer)
        case RedexKind.REN:
            return expand_ren(d, redex, supply)


# ==============================================================================
# IN CONTEXT
# ==============================================================================


def _changed(before: Context, after: Context) -> Context:
    return Context(tuple((k, v) for k, v in after.items() if before.get(k) != v))


def expand_at(
    d: Derivation,
    term: Term,
    position: Position,
    system: System = System.S,
    operand_typer: Optional[OperandTyper] = None,
    supply: Optional[FreshSupply] = None,
) -> Optional[Derivation]:
    """Derivation for ``term`` from one for the term after contracting at ``position``.

    Returns None when the expansion would change the type of a binder
    above the redex, or when an unused SN operand cannot be typed.
    """
    if supply is None:
        supply = FreshSupply(derivation_identifiers(d) | all_identifiers(term))
    bound: set[str] = set()
    changes: list[tuple[VarContext, NameContext]] = []

    def walk(current: Derivation, source: Term, path: Position) -> Optional[Derivation]:
        if current.rule in (Rule.INTER, Rule.INTER_BOT):
            premises = [walk(p, source, path) for p in current.premises]
            if any(p is None for p in premises):
                return None
            return replace(current, conclusion=replace(current.conclusion, term=source), premises=tuple(premises))
        if not path:
            expanded = expand_redex(current, source, supply, system, operand_typer)
            if expanded is None:
                return None
            new_vars = _changed(current.vctx, expanded.vctx)
            new_names = _changed(current.nctx, expanded.nctx)
            if bound & (set(new_vars.keys()) | set(new_names.keys())):
                return None
            changes.append((new_vars, new_names))
            return expanded

        step, rest = path[0], path[1:]
        w = current.witness
        match (current.rule, step):
            case (Rule.APP, "fun"):
                fun_d = walk(current.premises[0], source.fun, rest)
                premises = None if fun_d is None else (fun_d, current.premises[1])
            case (Rule.APP, "arg"):
                arg_d = walk(current.premises[1], source.arg, rest)
                premises = None if arg_d is None else (current.premises[0], arg_d)
            case (Rule.ABS, "body"):
                bound.add(w.var)
                sub = walk(current.premises[0], open_lam(source, w.var), rest)
                premises = None if sub is None else (sub,)
            case (Rule.MU | Rule.MU_PRIME, "body"):
                bound.add(w.name)
                sub = walk(current.premises[0], open_mu(source, w.name)[1], rest)
                premises = None if sub is None else (sub,)
            case _:
                raise PositionError(f"Derivation has no {step} premise at {format_position(position)}")
        if premises is None:
            return None
        return replace(current, conclusion=replace(current.conclusion, term=source), premises=premises)

    result = walk(d, term, position)
    if result is None:
        return None
    for new_vars, new_names in changes:
        result = recontext(result, new_vars, new_names)
    return result
