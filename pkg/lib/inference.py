"""
Inference Module
================
Bounded type-assignment search, goal-directed derivation, the
classification report and the subject-reduction check.

Typings are built constructively: a term is reduced along its
leftmost-outermost redexes until a (head) normal form is reached, the
normal form is typed directly, and the derivation is carried back to the
original term by subject expansion. A bottom-up enumeration over
derivation height and width then adds the typings synthesis does not
reach, such as intersections of several constants.
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from lib.derivations import (
    Derivation,
    FreshSupply,
    Rule,
    System,
    Witness,
    check_derivation,
    derivation_height,
    derivation_width,
    node,
    omega_node,
    recontext,
)
from lib.expansion import expand_at
from lib.reduction import (
    RedexKind,
    SNStatus,
    SNVerdict,
    ReductionStatus,
    contract,
    head_normalize,
    is_hnf,
    is_nf,
    is_sn,
    normalize,
    redex_kind,
    reduction_graph,
)
from lib.strict_types import (
    EMPTY_CTX,
    OMEGA,
    OMEGA_CONT,
    BasicType,
    Context,
    ContinuationType,
    IntersectionType,
    NameContext,
    VarContext,
    arrow,
    ctx_leq,
    inter,
    inter_cont,
    inter_ctx,
    inter_name_ctx,
    name_ctx_leq,
    omega_free,
    single_basic,
    type_width,
    weaker_conts,
)
from lib.syntax import pretty
from lib.terms import (
    App,
    Bottom,
    Lam,
    LmuError,
    Mu,
    Position,
    Term,
    Var,
    all_identifiers,
    open_lam,
    open_mu,
    spine,
    subterm_at,
)

logger = logging.getLogger(__name__)

TYPE_CONSTANTS = ("p", "q", "r", "s", "t")


def type_constant(index: int) -> str:
    if index < len(TYPE_CONSTANTS):
        return TYPE_CONSTANTS[index]
    return f"p{index}"


class Mode(str, Enum):
    HEAD = "head"
    NORMAL = "normal"
    STRONG = "strong"


@dataclass(frozen=True)
class Typing:
    vctx: VarContext
    type: IntersectionType
    nctx: NameContext
    derivation: Derivation = field(compare=False, repr=False)


# ==============================================================================
# SYNTHESIS
# ==============================================================================


def head_redex_position(term: Term, contract_ren: bool = True) -> Optional[Position]:
    """Position of the redex heading ``term``, if its head is not a variable."""
    match term:
        case Mu(_, _, Mu()) if contract_ren:
            return ()
        case Lam() | Mu():
            return None
    head, args = spine(term)
    if args and isinstance(head, (Lam, Mu)):
        return ("fun",) * (len(args) - 1)
    return None


def _head_chain(term: Term, budget, contract_ren: bool = True) -> tuple[list[tuple[Term, Position]], Optional[Term]]:
    """Contract head redexes, charging one unit of ``budget.fuel`` per term visited.

    Returns the contracted (term, position) pairs and the final term, or
    None as the final term once the fuel runs out.
    """
    chain: list[tuple[Term, Position]] = []
    current = term
    while True:
        budget.fuel -= 1
        if budget.fuel < 0:
            return chain, None
        position = head_redex_position(current, contract_ren)
        if position is None:
            return chain, current
        chain.append((current, position))
        current = contract(current, position)


class _Synthesizer:
    """Builds one derivation per term.

    HEAD types head normal forms (arguments get ω), NORMAL types normal
    forms without ω, STRONG additionally types every erased operand so the
    result lives in SN.
    """

    def __init__(self, mode: Mode, head: str, fuel: int, supply: FreshSupply):
        self.mode = mode
        self.head = head
        self.fuel = fuel
        self.supply = supply
        self.system = System.SN if mode == Mode.STRONG else System.S

    def synth(self, term: Term) -> Optional[Derivation]:
        chain, current = _head_chain(term, self)
        if current is None:
            return None
        d = self._direct(current)
        typer = self.synth if self.mode == Mode.STRONG else None
        for source, position in reversed(chain):
            if d is None:
                return None
            d = expand_at(d, source, position, self.system, typer, self.supply)
        return d

    def _direct(self, term: Term) -> Optional[Derivation]:
        match term:
            case Var(str(x)):
                leaf = BasicType(OMEGA_CONT, self.head)
                return node(Rule.AX, Context.of({x: inter(leaf)}), term, leaf, EMPTY_CTX)
            case Lam(hint, _):
                return self._abstraction(term, hint)
            case Mu(hint, _, _):
                return self._mu(term, hint)
        head, args = spine(term)
        if isinstance(head, Var) and isinstance(head.ref, str):
            return self._spine(head.ref, args)
        return None

    def _abstraction(self, term: Lam, hint: str) -> Optional[Derivation]:
        x = self.supply.fresh(hint)
        d = self.synth(open_lam(term, x))
        if d is None:
            return None
        if x not in d.vctx:
            unused = OMEGA if self.mode == Mode.HEAD else inter(BasicType(OMEGA_CONT, self.head))
            d = recontext(d, Context.of({x: unused}))
        result = single_basic(d.type)
        return node(
            Rule.ABS,
            d.vctx.remove(x),
            term,
            arrow(d.vctx.get(x), result.cont, result.head),
            d.nctx,
            [d],
            Witness(var=x),
        )

    def _mu(self, term: Mu, hint: str) -> Optional[Derivation]:
        alpha = self.supply.fresh(hint)
        target, body = open_mu(term, alpha)
        d = self.synth(body)
        if d is None:
            return None
        result = single_basic(d.type)
        # The name receiving the body's continuation must accept it.
        d = recontext(d, EMPTY_CTX, Context.of({target: result.cont}))
        if alpha not in d.nctx:
            d = recontext(d, EMPTY_CTX, Context.of({alpha: OMEGA_CONT}))
        rule = Rule.MU if target == alpha else Rule.MU_PRIME
        return node(
            rule,
            d.vctx,
            term,
            BasicType(d.nctx.get(alpha), result.head),
            d.nctx.remove(alpha),
            [d],
            Witness(name=alpha, cont=result.cont),
        )

    def _spine(self, head: str, args: list[Term]) -> Optional[Derivation]:
        if self.mode == Mode.HEAD:
            full = BasicType(ContinuationType((OMEGA,) * len(args)), self.head)
            vctx, nctx = Context.of({head: inter(full)}), EMPTY_CTX
            arg_ds = [omega_node(vctx, a, nctx) for a in args]
        else:
            arg_ds = []
            for a in args:
                d = self.synth(a)
                if d is None:
                    return None
                arg_ds.append(d)
            full = BasicType(ContinuationType(tuple(d.type for d in arg_ds)), self.head)
            vctx, nctx = Context.of({head: inter(full)}), EMPTY_CTX
            for d in arg_ds:
                vctx = inter_ctx(vctx, d.vctx)
                nctx = inter_name_ctx(nctx, d.nctx)
            arg_ds = [recontext(d, vctx, nctx) for d in arg_ds]

        current = node(Rule.AX, vctx, Var(head), full, nctx)
        remaining = full.cont.args
        for a, arg_d in zip(args, arg_ds):
            remaining = remaining[1:]
            result = BasicType(ContinuationType(remaining), self.head)
            current = node(Rule.APP, vctx, App(current.term, a), result, nctx, [current, arg_d])
        return current


def synthesize(term: Term, mode: Mode | str, head: str = "p", fuel: int = 400) -> Optional[Derivation]:
    """One constructive typing of ``term`` in the given mode, or None within ``fuel``."""
    synthesizer = _Synthesizer(Mode(mode), head, fuel, FreshSupply(all_identifiers(term)))
    return synthesizer.synth(term)


# ==============================================================================
# BOUNDED ENUMERATION
# ==============================================================================


class _SearchExhausted(Exception):
    pass


def atom_intersections(width: int, system: System) -> list[IntersectionType]:
    """Intersections of at most ``width`` atoms Ω→ψi, ω first unless under SN."""
    atoms = [BasicType(OMEGA_CONT, type_constant(i)) for i in range(width)]
    found = [] if system == System.SN else [OMEGA]
    for size in range(1, width + 1):
        found.extend(inter(*combo) for combo in itertools.combinations(atoms, size))
    return found


def universe_conts(width: int, system: System) -> list[ContinuationType]:
    """Continuations of length at most ``width`` over atom intersections, shortest first."""
    entries = atom_intersections(width, system)
    return [
        ContinuationType(args)
        for length in range(width + 1)
        for args in itertools.product(entries, repeat=length)
    ]


class _Enumerator:
    """Every basic typing of a term reachable within a height and a width.

    Contexts are kept minimal and met when premises are combined. Choices the
    subject leaves open (the type of a variable, an unused binder, the
    continuation of an unused name) range over the finite universe built from
    the first ``width`` type constants. Each candidate costs one unit of fuel.
    """

    def __init__(self, system: System, fuel: int, supply: FreshSupply):
        self.system = system
        self.fuel = fuel
        self.supply = supply
        self.opened: dict[Term, tuple] = {}

    def spend(self) -> None:
        self.fuel -= 1
        if self.fuel < 0:
            raise _SearchExhausted()

    def run(self, term: Term, depth: int, width: int) -> list[Derivation]:
        found: list[Derivation] = []
        try:
            for height in range(1, depth + 1):
                for w in range(1, max(1, width) + 1):
                    self._prepare(w)
                    found.extend(self._stage(term, height))
        except _SearchExhausted:
            logger.debug(f"Enumeration of {pretty(term)} stopped at height {height}, width {w}")
        return found

    def _prepare(self, width: int) -> None:
        self.width = width
        self.heads = [type_constant(i) for i in range(width)]
        self.inters = atom_intersections(width, self.system)
        self.conts = universe_conts(width, self.system)
        self.memo: dict[tuple[Term, int], list[Derivation]] = {}

    def _stage(self, term: Term, height: int):
        yield from self.judgements(term, height)
        if height < 2:
            return
        parts = self.judgements(term, height - 1)
        for size in range(2, self.width + 1):
            for combo in itertools.combinations(parts, size):
                self.spend()
                if len({d.type for d in combo}) < size:
                    continue
                built = self._combine(term, inter(*(d.type for d in combo)), list(combo))
                if built is not None:
                    yield built

    # -- per-term judgements ---------------------------------------------------

    def judgements(self, term: Term, height: int) -> list[Derivation]:
        key = (term, height)
        if key not in self.memo:
            unique: dict[tuple, Derivation] = {}
            if height >= 1:
                for d in self._build(term, height):
                    unique.setdefault((d.vctx, d.type, d.nctx), d)
            self.memo[key] = list(unique.values())
        return self.memo[key]

    def _build(self, term: Term, height: int):
        match term:
            case Var(str(x)):
                for b in self._basics():
                    self.spend()
                    yield node(Rule.AX, Context.of({x: inter(b)}), term, b, EMPTY_CTX)
                return
            case Lam():
                if height >= 2:
                    yield from self._abstraction(term, height)
                return
            case Mu():
                if height >= 2:
                    yield from self._mu(term, height)
                return
            case App(fun, arg):
                head, args = spine(term)
                if isinstance(head, Var) and isinstance(head.ref, str):
                    yield from self._spine(head.ref, args, height)
                elif height >= 2:
                    yield from self._application(term, fun, arg, height)

    def _basics(self) -> list[BasicType]:
        return [BasicType(c, h) for h in self.heads for c in self.conts]

    def _abstraction(self, term: Lam, height: int):
        if term not in self.opened:
            x = self.supply.fresh(term.hint)
            self.opened[term] = (x, open_lam(term, x))
        x, body = self.opened[term]
        for d in self.judgements(body, height - 1):
            result = single_basic(d.type)
            have = d.vctx.get(x)
            for arg in [have] if have is not None else self.inters:
                self.spend()
                typed = d if have is not None else recontext(d, Context.of({x: arg}))
                full = arrow(arg, result.cont, result.head)
                if type_width(full) > self.width:
                    continue
                yield node(Rule.ABS, typed.vctx.remove(x), term, full, typed.nctx, [typed], Witness(var=x))

    def _mu(self, term: Mu, height: int):
        if term not in self.opened:
            alpha = self.supply.fresh(term.hint)
            self.opened[term] = (alpha,) + open_mu(term, alpha)
        alpha, target, body = self.opened[term]
        for d in self.judgements(body, height - 1):
            result = single_basic(d.type)
            sent = result.cont
            if target == alpha:
                rule, base = Rule.MU, d
                have = d.nctx.get(alpha)
                options = [sent] if have is not None else [sent] + [inter_cont(sent, c) for c in self.conts]
            else:
                # The name the body is sent to must accept its continuation.
                rule, base = Rule.MU_PRIME, recontext(d, EMPTY_CTX, Context.of({target: sent}))
                have = base.nctx.get(alpha)
                options = [have] if have is not None else self.conts
            for cont_type in dict.fromkeys(options):
                self.spend()
                if type_width(cont_type) > self.width:
                    continue
                typed = recontext(base, EMPTY_CTX, Context.of({alpha: cont_type}))
                own = typed.nctx.get(alpha)
                yield node(
                    rule,
                    typed.vctx,
                    term,
                    BasicType(own, result.head),
                    typed.nctx.remove(alpha),
                    [typed],
                    Witness(name=alpha, cont=sent),
                )

    def _application(self, term: App, fun: Term, arg: Term, height: int):
        for f in self.judgements(fun, height - 1):
            fun_type = single_basic(f.type)
            if not fun_type.cont.args:
                continue
            wanted = fun_type.cont.args[0]
            result = BasicType(ContinuationType(fun_type.cont.args[1:]), fun_type.head)
            for parts in self._typed_as(arg, wanted, height - 1):
                self.spend()
                vctx, nctx = _met([f] + parts)
                arg_d = self._argument(arg, wanted, parts, vctx, nctx)
                yield node(Rule.APP, vctx, term, result, nctx, [recontext(f, vctx, nctx), arg_d])

    def _spine(self, head: str, args: list[Term], height: int):
        k = len(args)
        if height < k + 1:
            return
        # The i-th argument sits under k - i application nodes.
        options = [self._argument_options(a, height - k + i) for i, a in enumerate(args)]
        for choice in itertools.product(*options):
            prefix = tuple(s for s, _ in choice)
            for c in self.conts:
                if len(prefix) + len(c.args) > self.width:
                    continue
                for psi in self.heads:
                    self.spend()
                    full = BasicType(ContinuationType(prefix + c.args), psi)
                    ax_ctx = Context.of({head: inter(full)})
                    parts = [p for _, ps in choice for p in ps]
                    vctx, nctx = _met(parts, ax_ctx)
                    current = node(Rule.AX, vctx, Var(head), full, nctx)
                    remaining = full.cont.args
                    for a, (wanted, ps) in zip(args, choice):
                        remaining = remaining[1:]
                        arg_d = self._argument(a, wanted, ps, vctx, nctx)
                        result = BasicType(ContinuationType(remaining), psi)
                        current = node(Rule.APP, vctx, App(current.term, a), result, nctx, [current, arg_d])
                    yield current

    # -- argument typings --------------------------------------------------------

    def _argument_options(self, term: Term, limit: int) -> list[tuple[IntersectionType, list[Derivation]]]:
        """Every intersection ``term`` can be given below ``limit``, with its parts."""
        found: list[tuple[IntersectionType, list[Derivation]]] = []
        if limit < 1:
            return found
        if self.system != System.SN:
            found.append((OMEGA, []))
        for d in self.judgements(term, limit):
            self.spend()
            found.append((d.type, [d]))
        if limit >= 2:
            parts = self.judgements(term, limit - 1)
            for size in range(2, self.width + 1):
                for combo in itertools.combinations(parts, size):
                    self.spend()
                    if len({d.type for d in combo}) == size:
                        found.append((inter(*(d.type for d in combo)), list(combo)))
        return found

    def _typed_as(self, term: Term, wanted: IntersectionType, limit: int):
        """Lists of basic derivations of ``term`` whose types make up ``wanted``."""
        if wanted.is_omega:
            if self.system != System.SN and limit >= 1:
                yield []
            return
        n = len(wanted.conjuncts)
        pool = self.judgements(term, limit if n == 1 else limit - 1)
        per_conjunct = [[d for d in pool if d.type == inter(b)] for b in wanted.conjuncts]
        for combo in itertools.product(*per_conjunct):
            yield list(combo)

    def _argument(
        self, term: Term, wanted: IntersectionType, parts: list[Derivation], vctx: VarContext, nctx: NameContext
    ) -> Derivation:
        if not parts:
            return omega_node(vctx, term, nctx)
        widened = [recontext(p, vctx, nctx) for p in parts]
        if len(widened) == 1:
            return widened[0]
        return node(Rule.INTER, vctx, term, wanted, nctx, widened)

    def _combine(self, term: Term, wanted: IntersectionType, parts: list[Derivation]) -> Optional[Derivation]:
        vctx, nctx = _met(parts)
        return self._argument(term, wanted, parts, vctx, nctx)


def _met(parts: list[Derivation], vctx: VarContext = EMPTY_CTX) -> tuple[VarContext, NameContext]:
    nctx: NameContext = EMPTY_CTX
    for p in parts:
        vctx = inter_ctx(vctx, p.vctx)
        nctx = inter_name_ctx(nctx, p.nctx)
    return vctx, nctx


def infer(
    term: Term,
    system: System | str = System.S,
    depth: int = 6,
    width: int = 3,
    fuel: int = 400,
) -> list[Typing]:
    """Typings of ``term`` whose derivations fit the height and width bounds.

    Constructive syntheses come first, then a bottom-up enumeration by
    height and then width until ``fuel`` runs out. Deterministic: ordered by
    derivation height, then width, then discovery.
    """
    system = System(system)
    modes = [Mode.HEAD, Mode.NORMAL, Mode.STRONG] if system == System.S else [Mode.STRONG]
    found: list[Derivation] = []
    if system == System.S:
        found.append(omega_node(EMPTY_CTX, term, EMPTY_CTX))

    for index in range(max(1, width)):
        for mode in modes:
            d = synthesize(term, mode, type_constant(index), fuel)
            if d is not None:
                found.append(d)

    enumerator = _Enumerator(system, fuel, FreshSupply(all_identifiers(term)))
    found.extend(enumerator.run(term, depth, width))

    unique: dict[tuple, Derivation] = {}
    for d in found:
        key = (d.vctx, d.type, d.nctx)
        if key in unique or derivation_height(d) > depth or derivation_width(d) > width:
            continue
        verdict = check_derivation(d, system)
        if not verdict.ok:
            logger.warning(f"Discarding a typing of {pretty(term)}: {verdict.errors[0].message}")
            continue
        unique[key] = d
    ordered = sorted(unique.values(), key=lambda d: (derivation_height(d), derivation_width(d)))
    logger.debug(f"infer {pretty(term)} under {system.value}: {len(ordered)} typing(s)")
    return [Typing(d.vctx, d.type, d.nctx, d) for d in ordered]



# ==============================================================================
# GOAL-DIRECTED DERIVATION
# ==============================================================================


class _Prover:
    def __init__(self, system: System, fuel: int, width: int, supply: FreshSupply):
        self.system = system
        self.fuel = fuel
        self.width = width
        self.supply = supply

    def prove(self, term: Term, vctx: VarContext, goal: IntersectionType, nctx: NameContext) -> Optional[Derivation]:
        if goal.is_omega:
            return None if self.system == System.SN else omega_node(vctx, term, nctx)
        parts = []
        for conjunct in goal.conjuncts:
            d = self.prove_basic(term, vctx, conjunct, nctx)
            if d is None:
                return None
            parts.append(d)
        if len(parts) == 1:
            return parts[0]
        return node(Rule.INTER, vctx, term, goal, nctx, parts)

    def prove_basic(self, term: Term, vctx: VarContext, goal: BasicType, nctx: NameContext) -> Optional[Derivation]:
        chain, current = _head_chain(term, self, contract_ren=False)
        if current is None:
            return None
        d = self._direct(current, vctx, goal, nctx)
        typer = self._operand(vctx, nctx) if self.system == System.SN else None
        for source, position in reversed(chain):
            if d is None:
                return None
            d = expand_at(d, source, position, self.system, typer, self.supply)
            if d is not None and (d.vctx != vctx or d.nctx != nctx):
                return None
        return d

    def _direct(self, term: Term, vctx: VarContext, goal: BasicType, nctx: NameContext) -> Optional[Derivation]:
        match term:
            case Var(str(x)):
                have = vctx.get(x)
                if have is not None and goal in have.conjuncts:
                    return node(Rule.AX, vctx, term, goal, nctx)
                return None
            case Bottom():
                return None
            case Lam(hint, _):
                if not goal.cont.args:
                    return None
                x = self.supply.fresh(hint)
                rest = BasicType(ContinuationType(goal.cont.args[1:]), goal.head)
                body = self.prove(open_lam(term, x), vctx.extend(x, goal.cont.args[0]), inter(rest), nctx)
                if body is None:
                    return None
                return node(Rule.ABS, vctx, term, goal, nctx, [body], Witness(var=x))
            case Mu(hint, _, _):
                return self._mu(term, hint, vctx, goal, nctx)
        head, args = spine(term)
        if isinstance(head, Var) and isinstance(head.ref, str):
            return self._spine(head.ref, args, vctx, goal, nctx)
        return None

    def _mu(self, term: Mu, hint: str, vctx: VarContext, goal: BasicType, nctx: NameContext) -> Optional[Derivation]:
        alpha = self.supply.fresh(hint)
        target, body = open_mu(term, alpha)
        inner_nctx = nctx.extend(alpha, goal.cont)
        sent = inner_nctx.get(target)
        if sent is None:
            return None
        rule = Rule.MU if target == alpha else Rule.MU_PRIME
        for weaker in weaker_conts(sent):
            d = self.prove(body, vctx, inter(BasicType(weaker, goal.head)), inner_nctx)
            if d is not None:
                return node(rule, vctx, term, goal, nctx, [d], Witness(name=alpha, cont=weaker))
            if self.fuel < 0:
                break
        return None

    def _spine(
        self, head: str, args: list[Term], vctx: VarContext, goal: BasicType, nctx: NameContext
    ) -> Optional[Derivation]:
        have = vctx.get(head)
        if have is None:
            return None
        n = len(args)
        for candidate in have.conjuncts:
            if candidate.head != goal.head or len(candidate.cont.args) < n:
                continue
            if ContinuationType(candidate.cont.args[n:]) != goal.cont:
                continue
            arg_ds = []
            for a, wanted in zip(args, candidate.cont.args):
                d = self.prove(a, vctx, wanted, nctx)
                if d is None:
                    break
                arg_ds.append(d)
            else:
                current = node(Rule.AX, vctx, Var(head), candidate, nctx)
                remaining = candidate.cont.args
                for a, arg_d in zip(args, arg_ds):
                    remaining = remaining[1:]
                    result = BasicType(ContinuationType(remaining), goal.head)
                    current = node(Rule.APP, vctx, App(current.term, a), result, nctx, [current, arg_d])
                return current
        return None

    def _operand(self, vctx: VarContext, nctx: NameContext):
        def typer(operand: Term) -> Optional[Derivation]:
            for index in range(max(1, self.width)):
                d = _Synthesizer(Mode.STRONG, type_constant(index), self.fuel, self.supply).synth(operand)
                if d is None:
                    continue
                try:
                    return recontext(d, vctx, nctx) if _fits(d, vctx, nctx) else None
                except LmuError:
                    return None
            return None

        return typer


def _fits(d: Derivation, vctx: VarContext, nctx: NameContext) -> bool:
    """The given contexts already provide everything ``d`` assumes."""
    return ctx_leq(vctx, d.vctx) and name_ctx_leq(nctx, d.nctx)


def derive(
    term: Term,
    vctx: VarContext,
    goal: IntersectionType,
    nctx: NameContext,
    system: System | str = System.S,
    fuel: int = 400,
    width: int = 3,
) -> Optional[Derivation]:
    """A derivation of exactly Γ ⊢ M : S | Δ, or None within ``fuel``."""
    system = System(system)
    taken = all_identifiers(term) | set(vctx.keys()) | set(nctx.keys())
    prover = _Prover(system, fuel, width, FreshSupply(taken))
    d = prover.prove(term, vctx, goal, nctx)
    if d is not None and not check_derivation(d, system).ok:
        logger.warning(f"Goal-directed derivation for {pretty(term)} failed its own check")
        return None
    return d


# ==============================================================================
# CLASSIFICATION
# ==============================================================================


@dataclass(frozen=True)
class ClassifyReport:
    """Both sides of the head-normalisation, normalisation and SN characterisations.

    Reduction-side fields are None when neither a witness nor an exhausted
    reduction graph settles them; typing-side fields are None when the
    bounded search found nothing.
    """

    term: Term
    hnf_by_reduction: Optional[bool]
    nf_by_reduction: Optional[bool]
    sn_by_graph: SNVerdict
    typeable_S_nonomega: Optional[bool]
    typeable_omega_free: Optional[bool]
    typeable_SN: Optional[bool]
    disagreements: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "term": pretty(self.term),
            "hnf_by_reduction": self.hnf_by_reduction,
            "nf_by_reduction": self.nf_by_reduction,
            "sn_by_graph": self.sn_by_graph.status.value,
            "typeable_S_nonomega": self.typeable_S_nonomega,
            "typeable_omega_free": self.typeable_omega_free,
            "typeable_SN": self.typeable_SN,
            "disagreements": list(self.disagreements),
        }


def _settled_by_graph(term: Term, graph_fuel: int, predicate) -> Optional[bool]:
    graph = reduction_graph(term, graph_fuel)
    if graph.graph["complete"] and not any(predicate(n) for n in graph.nodes):
        return False
    return None


def classify(
    term: Term,
    fuel: int = 1000,
    depth: int = 6,
    width: int = 3,
    search_fuel: int = 400,
    graph_fuel: int = 200,
) -> ClassifyReport:
    hnf, _ = head_normalize(term, fuel)
    hnf_by_reduction = True if hnf is not None else _settled_by_graph(term, graph_fuel, is_hnf)
    outcome = normalize(term, "lor", fuel)
    nf_by_reduction = (
        True if outcome.status == ReductionStatus.NORMAL else _settled_by_graph(term, graph_fuel, is_nf)
    )
    sn_by_graph = is_sn(term, graph_fuel)

    s_typings = infer(term, System.S, depth, width, search_fuel)
    nonomega = any(not t.type.is_omega for t in s_typings) or None
    omega_free_found = (
        any(omega_free(t.vctx) and omega_free(t.type) and omega_free(t.nctx) for t in s_typings) or None
    )
    sn_found = bool(infer(term, System.SN, depth, width, search_fuel)) or None

    disagreements = []
    if nonomega and hnf_by_reduction is False:
        disagreements.append("hnf")
    if omega_free_found and nf_by_reduction is False:
        disagreements.append("nf")
    if sn_found and sn_by_graph.status == SNStatus.NOT_SN:
        disagreements.append("sn")
    if disagreements:
        logger.error(f"Characterisation disagreement for {pretty(term)}: {', '.join(disagreements)}")

    return ClassifyReport(
        term,
        hnf_by_reduction,
        nf_by_reduction,
        sn_by_graph,
        nonomega,
        omega_free_found,
        sn_found,
        tuple(disagreements),
    )


# ==============================================================================
# SUBJECT REDUCTION
# ==============================================================================


class SubjectReduction(str, Enum):
    OK = "ok"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SubjectReductionResult:
    status: SubjectReduction
    derivation: Optional[Derivation] = None


def check_subject_reduction(
    d: Derivation,
    step: tuple[Position, RedexKind],
    fuel: int = 400,
    width: int = 3,
) -> SubjectReductionResult:
    """Re-derive the conclusion of ``d`` for the term after the given one-step reduction.

    Raises LmuError when ``step`` does not name a redex of that kind in ``d.term``.
    """
    position, kind = step
    found_kind = redex_kind(subterm_at(d.term, position))
    if found_kind != RedexKind(kind):
        actual = found_kind.value if found_kind else "no redex"
        raise LmuError(f"Expected a {RedexKind(kind).value} redex at {list(position)}, found {actual}")
    reduct = contract(d.term, position)
    found = derive(reduct, d.vctx, d.type, d.nctx, System.S, fuel, width)
    if found is None:
        return SubjectReductionResult(SubjectReduction.UNKNOWN)
    return SubjectReductionResult(SubjectReduction.OK, found)
