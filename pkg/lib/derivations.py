"""
Derivations Module
==================
Judgements Γ ⊢ M : S | Δ, derivation trees, the rule-by-rule checker for
the systems S, ⊥ and SN, the JSON codec, contextual re-typing and the
translations between S- and ⊥-derivations.

Subjects of judgements are locally closed terms: going under a binder
opens it with the name stored in the node's witness.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Optional

from lib.approximation import direct_approx, join_all
from lib.strict_types import (
    EMPTY_CTX,
    OMEGA,
    BasicType,
    ContinuationType,
    IntersectionType,
    NameContext,
    VarContext,
    ctx_leq,
    inter,
    inter_ctx,
    inter_name_ctx,
    name_ctx_leq,
    omega_free,
    single_basic,
    subtype_cont,
    subtype_inter,
    type_width,
)
from lib.syntax import (
    ctx_to_json,
    format_cont,
    format_type,
    name_ctx_from_json,
    parse_cont,
    parse_term,
    parse_type,
    pretty,
    var_ctx_from_json,
)
from lib.terms import (
    App,
    Lam,
    LmuError,
    Mu,
    Term,
    Var,
    all_identifiers,
    close_var,
    fresh_name,
    free_names,
    free_vars,
    mu,
    open_lam,
    open_mu,
)

logger = logging.getLogger(__name__)


class DerivationFormatError(LmuError):
    """Derivation JSON is malformed."""


class Rule(str, Enum):
    AX = "Ax"
    INTER = "Inter"
    ABS = "Abs"
    APP = "App"
    MU = "Mu"
    MU_PRIME = "MuPrime"
    INTER_BOT = "InterBot"


class System(str, Enum):
    S = "S"
    BOT = "Bot"
    SN = "SN"


@dataclass(frozen=True)
class Judgement:
    vctx: VarContext
    term: Term
    type: IntersectionType
    nctx: NameContext


@dataclass(frozen=True)
class Witness:
    """Side-condition data: the bound variable of (Abs), the name and D of (μ)/(μ′)."""

    var: Optional[str] = None
    name: Optional[str] = None
    cont: Optional[ContinuationType] = None


@dataclass(frozen=True)
class Derivation:
    rule: Rule
    conclusion: Judgement
    premises: tuple["Derivation", ...] = ()
    witness: Witness = field(default_factory=Witness)

    @property
    def term(self) -> Term:
        return self.conclusion.term

    @property
    def type(self) -> IntersectionType:
        return self.conclusion.type

    @property
    def vctx(self) -> VarContext:
        return self.conclusion.vctx

    @property
    def nctx(self) -> NameContext:
        return self.conclusion.nctx


@dataclass(frozen=True)
class CheckIssue:
    path: tuple[int, ...]
    rule: str
    message: str
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CheckResult:
    errors: tuple[CheckIssue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors


class FreshSupply:
    """Hands out binder names that never repeat within one construction."""

    def __init__(self, taken: Iterable[str] = ()):
        self.taken: set[str] = set(taken)

    def fresh(self, hint: str) -> str:
        name = fresh_name(hint, self.taken)
        self.taken.add(name)
        return name


# ==============================================================================
# CONSTRUCTORS
# ==============================================================================


def node(
    rule: Rule,
    vctx: VarContext,
    term: Term,
    type_: IntersectionType | BasicType,
    nctx: NameContext,
    premises: Iterable[Derivation] = (),
    witness: Witness = Witness(),
) -> Derivation:
    return Derivation(rule, Judgement(vctx, term, inter(type_), nctx), tuple(premises), witness)


def omega_node(vctx: VarContext, term: Term, nctx: NameContext) -> Derivation:
    """M : ω by the empty intersection."""
    return node(Rule.INTER, vctx, term, OMEGA, nctx)


def intersect(derivations: list[Derivation], term: Term, vctx: VarContext, nctx: NameContext) -> Derivation:
    """Combine basic-typed derivations of one subject, dropping repeated types."""
    by_type: dict[IntersectionType, Derivation] = {}
    for d in derivations:
        by_type.setdefault(d.type, d)
    unique = list(by_type.values())
    if len(unique) == 1:
        return unique[0]
    return node(Rule.INTER, vctx, term, inter(*(d.type for d in unique)), nctx, unique)


def basic_parts(d: Derivation) -> list[Derivation]:
    """Basic-typed sub-derivations making up ``d``'s type."""
    if d.rule in (Rule.INTER, Rule.INTER_BOT):
        return [q for p in d.premises for q in basic_parts(p)]
    return [d]


# ==============================================================================
# CHECKER
# ==============================================================================


def check_derivation(d: Derivation, system: System | str = System.S) -> CheckResult:
    system = System(system)
    errors: list[CheckIssue] = []

    def visit(current: Derivation, path: tuple[int, ...]) -> None:
        for message, detail in _check_node(current, system):
            errors.append(CheckIssue(path, current.rule.value, message, detail))
        for index, premise in enumerate(current.premises):
            visit(premise, path + (index,))

    visit(d, ())
    if errors:
        logger.debug(f"Derivation rejected under {system.value}: {len(errors)} error(s)")
    return CheckResult(tuple(errors))


def _check_node(d: Derivation, system: System) -> list[tuple[str, dict]]:
    problems: list[tuple[str, dict]] = []
    j = d.conclusion

    if system == System.SN:
        for label, value in (("context", j.vctx), ("type", j.type), ("name context", j.nctx)):
            if not omega_free(value):
                problems.append((f"omega occurs in the {label} under SN", {}))

    arity = {Rule.AX: 0, Rule.ABS: 1, Rule.APP: 2, Rule.MU: 1, Rule.MU_PRIME: 1}
    if d.rule in arity and len(d.premises) != arity[d.rule]:
        problems.append(("arity", {"expected": arity[d.rule], "found": len(d.premises)}))
        return problems

    if d.rule in (Rule.INTER, Rule.INTER_BOT):
        return problems + _check_intersection(d, system)

    target = single_basic(j.type)
    if target is None:
        problems.append(("conclusion must have a basic type", {"type": format_type(j.type)}))
        return problems

    match d.rule:
        case Rule.AX:
            problems += _check_ax(j, target)
        case Rule.ABS:
            problems += _check_abs(d, target)
        case Rule.APP:
            problems += _check_app(d, target)
        case Rule.MU | Rule.MU_PRIME:
            problems += _check_mu(d, target)
    return problems


def _same_contexts(premise: Derivation, j: Judgement) -> list[tuple[str, dict]]:
    if premise.vctx != j.vctx or premise.nctx != j.nctx:
        return [("context clash", {})]
    return []


def _check_intersection(d: Derivation, system: System) -> list[tuple[str, dict]]:
    problems: list[tuple[str, dict]] = []
    j = d.conclusion
    n = len(d.premises)
    if d.rule == Rule.INTER and system == System.BOT:
        problems.append(("rule (∩) is replaced by (∩⊥) in the ⊥ system", {}))
    if d.rule == Rule.INTER_BOT and system != System.BOT:
        problems.append(("rule (∩⊥) belongs to the ⊥ system only", {}))
    if system == System.SN and n < 2:
        problems.append(("arity", {"expected": ">= 2", "found": n}))
    elif n == 1:
        problems.append(("arity", {"expected": "0 or >= 2", "found": n}))

    for premise in d.premises:
        problems += _same_contexts(premise, j)
        if single_basic(premise.type) is None:
            problems.append(("premise must have a basic type", {"type": format_type(premise.type)}))
    if inter(*(p.type for p in d.premises)) != j.type:
        problems.append(("type is not the intersection of the premise types", {"type": format_type(j.type)}))

    if d.rule == Rule.INTER_BOT:
        joined = join_all([p.term for p in d.premises])
        if joined is None:
            problems.append(("join undefined", {}))
        elif joined != j.term:
            problems.append(("subject is not the join of the premise subjects", {"expected": pretty(joined)}))
    else:
        for premise in d.premises:
            if premise.term != j.term:
                problems.append(("premise subject differs", {"premise": pretty(premise.term)}))
    return problems


def _check_ax(j: Judgement, target: BasicType) -> list[tuple[str, dict]]:
    if not isinstance(j.term, Var) or not isinstance(j.term.ref, str):
        return [("subject of (Ax) must be a variable", {})]
    have = j.vctx.get(j.term.ref)
    if have is None:
        return [("variable not in context", {"var": j.term.ref})]
    if not subtype_inter(have, inter(target)):
        return [("side condition fails", {"left": format_type(have), "right": format_type(target)})]
    return []


def _check_abs(d: Derivation, target: BasicType) -> list[tuple[str, dict]]:
    j = d.conclusion
    premise = d.premises[0]
    x = d.witness.var
    if not isinstance(j.term, Lam):
        return [("subject of (Abs) must be an abstraction", {})]
    if not target.cont.args:
        return [("type of (Abs) must be S×C→ψ", {"type": format_type(target)})]
    if x is None:
        return [("missing bound variable witness", {})]
    problems: list[tuple[str, dict]] = []
    if x in j.vctx or x in free_vars(j.term):
        problems.append(("bound variable is not fresh", {"var": x}))
        return problems
    arg, rest = target.cont.args[0], ContinuationType(target.cont.args[1:])
    if premise.vctx != j.vctx.extend(x, arg) or premise.nctx != j.nctx:
        problems.append(("context clash", {"var": x}))
    if premise.term != open_lam(j.term, x):
        problems.append(("premise subject is not the body", {}))
    if premise.type != inter(BasicType(rest, target.head)):
        problems.append(("premise type does not match", {"premise": format_type(premise.type)}))
    return problems


def _check_app(d: Derivation, target: BasicType) -> list[tuple[str, dict]]:
    j = d.conclusion
    fun, arg = d.premises
    if not isinstance(j.term, App):
        return [("subject of (App) must be an application", {})]
    problems = _same_contexts(fun, j) + _same_contexts(arg, j)
    if fun.term != j.term.fun or arg.term != j.term.arg:
        problems.append(("premise subjects do not match", {}))
    fun_type = single_basic(fun.type)
    if fun_type is None or not fun_type.cont.args:
        problems.append(("function premise must have type S×C→ψ", {"type": format_type(fun.type)}))
        return problems
    if fun_type.head != target.head or ContinuationType(fun_type.cont.args[1:]) != target.cont:
        problems.append(("function type does not produce the conclusion", {"type": format_type(fun.type)}))
    if arg.type != fun_type.cont.args[0]:
        problems.append(
            ("argument type mismatch", {"expected": format_type(fun_type.cont.args[0]), "found": format_type(arg.type)})
        )
    return problems


def _check_mu(d: Derivation, target: BasicType) -> list[tuple[str, dict]]:
    j = d.conclusion
    premise = d.premises[0]
    alpha, wanted = d.witness.name, d.witness.cont
    if not isinstance(j.term, Mu):
        return [("subject must be a μ-abstraction", {})]
    if alpha is None or wanted is None:
        return [("missing name witness", {})]
    if alpha in j.nctx or alpha in free_names(j.term):
        return [("bound name is not fresh", {"name": alpha})]
    own_target = j.term.target == 0
    if d.rule == Rule.MU and not own_target:
        return [("rule (μ) needs [α] with α the bound name", {})]
    if d.rule == Rule.MU_PRIME and own_target:
        return [("rule (μ′) needs [β] with β ≠ α", {})]

    problems: list[tuple[str, dict]] = []
    _, body = open_mu(j.term, alpha)
    if premise.vctx != j.vctx or premise.nctx != j.nctx.extend(alpha, target.cont):
        problems.append(("context clash", {"name": alpha}))
    if premise.term != body:
        problems.append(("premise subject is not the body", {}))
    if premise.type != inter(BasicType(wanted, target.head)):
        problems.append(("premise type does not match the witness", {"premise": format_type(premise.type)}))

    if d.rule == Rule.MU:
        sent = target.cont
    else:
        beta = j.term.target
        sent = j.nctx.get(beta) if isinstance(beta, str) else None
        if sent is None:
            problems.append(("name not in context", {"name": str(beta)}))
            return problems
    if not subtype_cont(sent, wanted):
        problems.append(("side condition fails", {"left": format_cont(sent), "right": format_cont(wanted)}))
    return problems


# ==============================================================================
# MEASURES
# ==============================================================================


def derivation_height(d: Derivation) -> int:
    return 1 + max((derivation_height(p) for p in d.premises), default=0)


def derivation_width(d: Derivation) -> int:
    j = d.conclusion
    own = [type_width(j.type)] + [type_width(t) for _, t in j.vctx.items()] + [type_width(c) for _, c in j.nctx.items()]
    return max(own + [derivation_width(p) for p in d.premises])


def skeleton(d: Derivation) -> tuple:
    """Rule tree with (∩⊥) read as (∩)."""
    rule = Rule.INTER if d.rule == Rule.INTER_BOT else d.rule
    return (rule.value, tuple(skeleton(p) for p in d.premises))


def derivation_identifiers(d: Derivation) -> set[str]:
    found = set(d.vctx.keys()) | set(d.nctx.keys()) | all_identifiers(d.term)
    if d.witness.var:
        found.add(d.witness.var)
    if d.witness.name:
        found.add(d.witness.name)
    for p in d.premises:
        found |= derivation_identifiers(p)
    return found


def iter_nodes(d: Derivation) -> Iterable[Derivation]:
    yield d
    for p in d.premises:
        yield from iter_nodes(p)


# ==============================================================================
# CONTEXT OPERATIONS
# ==============================================================================


def recontext(d: Derivation, extra_vars: VarContext = EMPTY_CTX, extra_names: NameContext = EMPTY_CTX) -> Derivation:
    """Meet every context in ``d`` with the given extra bindings.

    Binders inside ``d`` must not be bound by the extras.
    """
    if not len(extra_vars) and not len(extra_names):
        return d
    if d.witness.var is not None and d.witness.var in extra_vars:
        raise LmuError(f"Variable '{d.witness.var}' is bound inside the derivation")
    if d.witness.name is not None and d.witness.name in extra_names:
        raise LmuError(f"Name '{d.witness.name}' is bound inside the derivation")
    j = d.conclusion
    conclusion = Judgement(inter_ctx(j.vctx, extra_vars), j.term, j.type, inter_name_ctx(j.nctx, extra_names))
    premises = tuple(recontext(p, extra_vars, extra_names) for p in d.premises)
    return replace(d, conclusion=conclusion, premises=premises)


def restrict(d: Derivation, var_keys: Iterable[str], name_keys: Iterable[str]) -> Derivation:
    """Drop context entries outside the given subjects (binders are kept as they appear)."""
    keep_vars, keep_names = set(var_keys), set(name_keys)
    if d.witness.var is not None:
        keep_vars = keep_vars | {d.witness.var}
    if d.witness.name is not None:
        keep_names = keep_names | {d.witness.name}
    j = d.conclusion
    conclusion = Judgement(j.vctx.restrict(var_keys), j.term, j.type, j.nctx.restrict(name_keys))
    premises = tuple(restrict(p, keep_vars, keep_names) for p in d.premises)
    return replace(d, conclusion=conclusion, premises=premises)


def with_contexts(d: Derivation, vctx: VarContext, nctx: NameContext) -> Derivation:
    """Re-root ``d`` at exactly ``vctx``/``nctx`` when they are at least as strong."""
    restricted = restrict(d, vctx.keys(), nctx.keys())
    result = recontext(restricted, vctx, nctx)
    if result.vctx != vctx or result.nctx != nctx:
        raise LmuError("Contexts are not strong enough to carry the derivation")
    return result


def admit_leq(d: Derivation, vctx: VarContext, target: IntersectionType, nctx: NameContext) -> Derivation:
    """Derivation of Γ′ ⊢ M : T | Δ′ from one of Γ ⊢ M : S | Δ with Γ′ ≤ Γ, S ≤ T, Δ′ ≤ Δ."""
    if not ctx_leq(vctx, d.vctx) or not name_ctx_leq(nctx, d.nctx) or not subtype_inter(d.type, target):
        raise LmuError("admit_leq needs Γ′ ≤ Γ, S ≤ T and Δ′ ≤ Δ")
    widened = recontext(d, vctx, nctx)
    parts = {p.type: p for p in basic_parts(widened)}
    chosen = [parts[inter(b)] for b in target.conjuncts]
    if not chosen:
        return omega_node(widened.vctx, d.term, widened.nctx)
    return intersect(chosen, d.term, widened.vctx, widened.nctx)


# ==============================================================================
# S / ⊥ TRANSLATIONS
# ==============================================================================


def to_bottom(d: Derivation) -> Derivation:
    """⊥-derivation with the same skeleton for some subject below ``d.term``."""
    j = d.conclusion
    premises = tuple(to_bottom(p) for p in d.premises)
    match d.rule:
        case Rule.INTER | Rule.INTER_BOT:
            term = join_all([p.term for p in premises])
            if term is None:
                raise LmuError("Premise subjects are not compatible")
            return replace(d, rule=Rule.INTER_BOT, conclusion=replace(j, term=term), premises=premises)
        case Rule.AX:
            return d
        case Rule.ABS:
            term = Lam(j.term.hint, close_var(premises[0].term, d.witness.var))
        case Rule.APP:
            term = App(premises[0].term, premises[1].term)
        case Rule.MU | Rule.MU_PRIME:
            alpha = d.witness.name
            target = alpha if d.rule == Rule.MU else j.term.target
            term = mu(alpha, target, premises[0].term)
            term = Mu(j.term.hint, term.target, term.body)
    return replace(d, conclusion=replace(j, term=term), premises=premises)


def lift(d: Derivation, term: Term) -> Derivation:
    """S-derivation of ``term`` from a ⊥-derivation of a subject below it."""
    if not direct_approx(d.term, term):
        raise LmuError(f"{pretty(d.term)} does not approximate {pretty(term)}")
    j = d.conclusion
    match d.rule:
        case Rule.INTER | Rule.INTER_BOT:
            premises = tuple(lift(p, term) for p in d.premises)
            return replace(d, rule=Rule.INTER, conclusion=replace(j, term=term), premises=premises)
        case Rule.AX:
            return replace(d, conclusion=replace(j, term=term))
        case Rule.ABS:
            premises = (lift(d.premises[0], open_lam(term, d.witness.var)),)
        case Rule.APP:
            premises = (lift(d.premises[0], term.fun), lift(d.premises[1], term.arg))
        case Rule.MU | Rule.MU_PRIME:
            premises = (lift(d.premises[0], open_mu(term, d.witness.name)[1]),)
    return replace(d, conclusion=replace(j, term=term), premises=premises)


# ==============================================================================
# JSON
# ==============================================================================


def derivation_to_json(d: Derivation) -> dict[str, Any]:
    witness: dict[str, str] = {}
    if d.witness.var is not None:
        witness["var"] = d.witness.var
    if d.witness.name is not None:
        witness["name"] = d.witness.name
    if d.witness.cont is not None:
        witness["cont"] = format_cont(d.witness.cont)
    return {
        "rule": d.rule.value,
        "ctx": ctx_to_json(d.vctx),
        "term": pretty(d.term),
        "type": format_type(d.type),
        "nctx": ctx_to_json(d.nctx),
        "witness": witness,
        "premises": [derivation_to_json(p) for p in d.premises],
    }


def derivation_from_json(data: Any) -> Derivation:
    if not isinstance(data, dict):
        raise DerivationFormatError("Derivation node must be an object")
    try:
        rule = Rule(data["rule"])
        conclusion = Judgement(
            var_ctx_from_json(data.get("ctx", {})),
            parse_term(data["term"]),
            parse_type(data["type"]),
            name_ctx_from_json(data.get("nctx", {})),
        )
        raw = data.get("witness") or {}
        witness = Witness(
            var=raw.get("var"),
            name=raw.get("name"),
            cont=parse_cont(raw["cont"]) if "cont" in raw else None,
        )
        premises = tuple(derivation_from_json(p) for p in data.get("premises", []))
    except (KeyError, ValueError, TypeError, AttributeError) as e:
        raise DerivationFormatError(f"Malformed derivation node: {e}") from e
    except LmuError as e:
        raise DerivationFormatError(str(e)) from e
    return Derivation(rule, conclusion, premises, witness)
