"""
Properties Module
=================
Desk-scale checks of the calculus' meta-theory: confluence, approximation
and joins, type inclusion and meets, soundness of inference, the S/⊥
translations, subject reduction and expansion, and the three
characterisations.

Each check returns a result dict ``{"property", "subject", "ok", "detail"}``
where ``ok`` is None when the bounds were too small to decide.
"""

import itertools
import logging
from typing import Iterable, Optional

import pandas as pd

from lib.approximation import (
    approximants,
    direct_approx,
    is_approximant,
    join,
    truncate,
)
from lib.derivations import (
    System,
    check_derivation,
    lift,
    recontext,
    skeleton,
    to_bottom,
)
from lib.expansion import expand_at
from lib.generate import (
    enumerate_contexts,
    enumerate_types,
    make_rng,
    random_cont,
    random_inter,
    random_redex,
    random_term,
)
from lib.inference import SubjectReduction, check_subject_reduction, classify, derive, infer, synthesize
from lib.reduction import (
    RedexKind,
    ReductionStatus,
    Strategy,
    contract,
    graph_leaves,
    is_hnf,
    is_nf,
    normalize,
    reduction_graph,
    redexes,
    rejoins,
)
from lib.strict_types import (
    OMEGA_CONT,
    BasicType,
    Context,
    ContinuationType,
    IntersectionType,
    ctx_leq,
    inter,
    inter_cont,
    inter_ctx,
    inter_name_ctx,
    inter_types,
    name_ctx_leq,
    subtype_cont,
    subtype_inter,
)
from lib.syntax import parse_term, pretty
from lib.terms import App, Bottom, Lam, LmuError, Mu, Term, Var, is_pure

logger = logging.getLogger(__name__)

# Typings per term fed to the per-derivation checks.
TYPINGS_PER_CHECK = 12
# Largest type size in the exhaustive inclusion and meet checks.
INCLUSION_UNIVERSE_SIZE = 5
# Terms below a subject used by the join checks.
CUTS_PER_CHECK = 16
ASSOCIATIVITY_CUTS = 8


def _result(prop: str, subject: str, ok: Optional[bool], detail: str = "") -> dict:
    return {"property": prop, "subject": subject, "ok": ok, "detail": detail}


def _sampled(typings: list) -> list:
    return typings[:TYPINGS_PER_CHECK]


# ==============================================================================
# REDUCTION
# ==============================================================================

RULE_EXAMPLES = (
    ("(\\x.x y) z", "z y"),
    ("(mu b.[b] x) y", "mu b.[b] x y"),
    ("(mu b.[a] x) y", "mu b.[a] x"),
    ("mu a.[b] mu g.[g] x", "mu a.[b] x"),
    ("mu a.[b] mu g.[d] x", "mu a.[d] x"),
)


def check_rule_examples() -> list[dict]:
    """The hand-derived single steps for β, μ in both cases and Ren."""
    results = []
    for source, expected in RULE_EXAMPLES:
        term = parse_term(source)
        reduct = contract(term, ())
        ok = reduct == parse_term(expected)
        results.append(_result("rule-example", source, ok, pretty(reduct)))
    return results


def check_roundtrip(term: Term) -> dict:
    return _result("print-roundtrip", pretty(term), parse_term(pretty(term)) == term)


def check_confluence(term: Term, graph_fuel: int = 200) -> dict:
    graph = reduction_graph(term, graph_fuel)
    if not graph.graph["complete"]:
        return _result("confluence", pretty(term), None, "graph not fully explored")
    leaves = graph_leaves(graph)
    if len(leaves) > 1:
        return _result("confluence", pretty(term), False, f"{len(leaves)} distinct normal forms")
    for source in graph.nodes:
        successors = list(dict.fromkeys(graph.successors(source)))
        for left, right in itertools.combinations(successors, 2):
            if not rejoins(graph, left, right):
                return _result("confluence", pretty(term), False, f"{pretty(left)} / {pretty(right)}")
    return _result("confluence", pretty(term), True, f"{graph.number_of_nodes()} reducts")


def check_strategies_agree(term: Term, fuel: int = 200, seed: int = 0) -> dict:
    finals = []
    for strategy in Strategy:
        outcome = normalize(term, strategy, fuel, seed)
        if outcome.status == ReductionStatus.NORMAL:
            finals.append(outcome.final)
    if len(finals) < 2:
        return _result("strategies-agree", pretty(term), None, "fewer than two strategies normalised")
    return _result("strategies-agree", pretty(term), all(f == finals[0] for f in finals))


# ==============================================================================
# APPROXIMATION
# ==============================================================================


def _all_cuts(term: Term) -> list[Term]:
    """Every term below ``term`` in ⊑."""
    match term:
        case Bottom() | Var():
            below = [term]
        case Lam(hint, body):
            below = [Lam(hint, b) for b in _all_cuts(body)]
        case Mu(hint, target, body):
            below = [Mu(hint, target, b) for b in _all_cuts(body)]
        case App(fun, arg):
            below = [App(f, a) for f in _all_cuts(fun) for a in _all_cuts(arg)]
    return list(dict.fromkeys([Bottom()] + below))


def check_truncation_maximal(term: Term) -> dict:
    """Brute force: every approximant below ``term`` is below its truncation."""
    cut = truncate(term)
    if not is_approximant(cut) or not direct_approx(cut, term):
        return _result("truncation-maximal", pretty(term), False, "truncation is not an approximant below the term")
    for candidate in _all_cuts(term):
        if is_approximant(candidate) and not direct_approx(candidate, cut):
            return _result("truncation-maximal", pretty(term), False, pretty(candidate))
    return _result("truncation-maximal", pretty(term), True)


def check_hnf_truncation(term: Term) -> dict:
    ok = is_hnf(term) == (truncate(term) != Bottom())
    return _result("hnf-iff-nonbottom-truncation", pretty(term), ok)


def check_approximants_compatible(term: Term, fuel: int = 100) -> dict:
    found = approximants(term, fuel).maximal
    ok = all(join(a, b) is not None for a, b in itertools.combinations(found, 2))
    return _result("approximants-compatible", pretty(term), ok, f"{len(found)} maximal")


def check_approximants_under_reduction(term: Term, fuel: int = 50) -> dict:
    """Approximants of a one-step reduct are approximants of the term."""
    source = approximants(term, fuel + 1)
    for position, _ in redexes(term):
        reduct = contract(term, position)
        for a in approximants(reduct, fuel).maximal:
            if not source.member(a):
                return _result("approximants-under-reduction", pretty(term), False, pretty(a))
    return _result("approximants-under-reduction", pretty(term), True)


def _cuts(term: Term) -> list[Term]:
    return _all_cuts(term)[:CUTS_PER_CHECK]


def check_join_lub(term: Term) -> dict:
    """Two terms below ``term`` join to their least upper bound, itself below ``term``."""
    for left, right in itertools.combinations(_cuts(term), 2):
        joined = join(left, right)
        if joined is None:
            return _result("join-lub", pretty(term), False, f"{pretty(left)} / {pretty(right)} incompatible")
        if not (direct_approx(left, joined) and direct_approx(right, joined) and direct_approx(joined, term)):
            return _result("join-lub", pretty(term), False, f"{pretty(left)} / {pretty(right)}")
    return _result("join-lub", pretty(term), True)


def _join_opt(left: Optional[Term], right: Optional[Term]) -> Optional[Term]:
    if left is None or right is None:
        return None
    return join(left, right)


def check_join_laws(term: Term, other: Optional[Term] = None) -> dict:
    """⊔ is commutative, associative and idempotent on terms below ``term`` (and ``other``)."""
    if other is None:
        cuts = _cuts(term)
    else:
        paired = itertools.zip_longest(_cuts(term), _cuts(other))
        cuts = [c for pair in paired for c in pair if c is not None]
    for a in cuts:
        if join(a, a) != a:
            return _result("join-laws", pretty(term), False, f"{pretty(a)} not idempotent")
    for a, b in itertools.product(cuts, cuts):
        if join(a, b) != join(b, a):
            return _result("join-laws", pretty(term), False, f"{pretty(a)} / {pretty(b)} not commutative")
    for a, b, c in itertools.product(cuts[:ASSOCIATIVITY_CUTS], repeat=3):
        if _join_opt(join(a, b), c) != _join_opt(a, join(b, c)):
            detail = f"{pretty(a)} / {pretty(b)} / {pretty(c)} not associative"
            return _result("join-laws", pretty(term), False, detail)
    return _result("join-laws", pretty(term), True)


def check_approx_preserved(term: Term, graph_fuel: int = 100) -> dict:
    """The truncation of ``term`` stays below every reduct explored from it."""
    cut = truncate(term)
    graph = reduction_graph(term, graph_fuel)
    for reduct in graph.nodes:
        if not direct_approx(cut, reduct):
            return _result("approx-preserved", pretty(term), False, pretty(reduct))
    return _result("approx-preserved", pretty(term), True, f"{graph.number_of_nodes()} reducts")


# ==============================================================================
# TYPE INCLUSION
# ==============================================================================


def _universe(samples: Iterable[IntersectionType | ContinuationType]) -> tuple[set, set]:
    inters: set[IntersectionType] = set()
    conts: set[ContinuationType] = {OMEGA_CONT}

    def add_inter(value: IntersectionType) -> None:
        if value in inters:
            return
        inters.add(value)
        for b in value.conjuncts:
            add_inter(inter(b))
            add_cont(b.cont)

    def add_cont(value: ContinuationType) -> None:
        if value in conts:
            return
        conts.add(value)
        for a in value.args:
            add_inter(a)
        if value.args:
            add_cont(ContinuationType(value.args[1:]))

    for sample in samples:
        if isinstance(sample, IntersectionType):
            add_inter(sample)
        else:
            add_cont(sample)
    return inters, conts


def _compose(pairs: set) -> set:
    successors: dict = {}
    for a, b in pairs:
        successors.setdefault(a, set()).add(b)
    return {(a, d) for a, b in pairs for d in successors.get(b, ())}


def inclusion_closure(inters: set, conts: set) -> tuple[set, set]:
    """Least relation closed under the inclusion rules on a finite universe.

    Rules: reflexivity, transitivity, selection of a conjunct, introduction
    of an intersection, every continuation below Ω, componentwise products.
    """
    inter_pairs = {(s, s) for s in inters}
    cont_pairs = {(c, c) for c in conts} | {(c, OMEGA_CONT) for c in conts}
    changed = True
    while changed:
        changed = False
        new_inter = set(inter_pairs)
        for s in inters:
            for b in s.conjuncts:
                new_inter.add((s, inter(b)))
            for t in inters:
                if all((s, inter(b)) in inter_pairs for b in t.conjuncts):
                    new_inter.add((s, t))
        new_inter |= _compose(inter_pairs)
        new_cont = set(cont_pairs)
        for c in conts:
            for d in conts:
                if c.args and d.args:
                    head_ok = (c.args[0], d.args[0]) in inter_pairs
                    tail_ok = (ContinuationType(c.args[1:]), ContinuationType(d.args[1:])) in cont_pairs
                    if head_ok and tail_ok:
                        new_cont.add((c, d))
        new_cont |= _compose(cont_pairs)
        if new_inter != inter_pairs or new_cont != cont_pairs:
            inter_pairs, cont_pairs = new_inter, new_cont
            changed = True
    return inter_pairs, cont_pairs


def check_inclusion_oracle(samples: list) -> dict:
    inters, conts = _universe(samples)
    inter_pairs, cont_pairs = inclusion_closure(inters, conts)
    for s, t in itertools.product(inters, inters):
        if subtype_inter(s, t) != ((s, t) in inter_pairs):
            return _result("inclusion-oracle", f"{len(inters)} types", False, f"{s} / {t}")
    for c, d in itertools.product(conts, conts):
        if subtype_cont(c, d) != ((c, d) in cont_pairs):
            return _result("inclusion-oracle", f"{len(conts)} continuations", False, f"{c} / {d}")
    return _result("inclusion-oracle", f"{len(inters)} types, {len(conts)} continuations", True)


def _meet_is_greatest(leq, meet, left, right, candidates) -> bool:
    glb = meet(left, right)
    if not leq(glb, left) or not leq(glb, right):
        return False
    return all(leq(k, glb) for k in candidates if leq(k, left) and leq(k, right))


def check_meets(inters: list, conts: list, contexts: list, name_contexts: list = ()) -> dict:
    """Meets of types, continuations and contexts are lower bounds above every other lower bound."""
    families = (
        ("types", subtype_inter, inter_types, inters),
        ("continuations", subtype_cont, inter_cont, conts),
        ("contexts", ctx_leq, inter_ctx, contexts),
        ("name contexts", name_ctx_leq, inter_name_ctx, list(name_contexts)),
    )
    for label, leq, meet, universe in families:
        for left, right in itertools.combinations_with_replacement(universe, 2):
            if not _meet_is_greatest(leq, meet, left, right, universe):
                return _result("meets", label, False, f"{left} / {right}")
    return _result("meets", f"{len(inters)} types, {len(conts)} continuations, {len(contexts)} contexts", True)


# ==============================================================================
# TYPE ASSIGNMENT
# ==============================================================================


def check_inference_sound(term: Term, system: System = System.S, depth: int = 6, width: int = 2) -> dict:
    typings = infer(term, system, depth, width)
    bad = [t for t in typings if not check_derivation(t.derivation, system).ok]
    return _result(f"inference-sound-{system.value}", pretty(term), not bad, f"{len(typings)} typings")


def check_bottom_translation(term: Term, depth: int = 8, width: int = 2) -> dict:
    """S-derivations go down to ⊥-derivations with the same skeleton and back up."""
    for typing in _sampled(infer(term, System.S, depth, width)):
        d = typing.derivation
        try:
            down = to_bottom(d)
            up = lift(down, term)
        except LmuError as e:
            return _result("bottom-translation", pretty(term), False, str(e))
        if not check_derivation(down, System.BOT).ok or skeleton(down) != skeleton(d):
            return _result("bottom-translation", pretty(term), False, "⊥-derivation rejected")
        if not direct_approx(down.term, term) or not check_derivation(up, System.S).ok:
            return _result("bottom-translation", pretty(term), False, "lifted derivation rejected")
    return _result("bottom-translation", pretty(term), True)


def check_weakening(term: Term, depth: int = 8, width: int = 2) -> dict:
    typings = infer(term, System.SN, depth, width)
    if not typings:
        return _result("weakening", pretty(term), None, "no SN typing found")
    extra_var = Context.of({"w_": inter(BasicType(OMEGA_CONT, "p"))})
    extra_name = Context.of({"k_": OMEGA_CONT})
    for typing in typings:
        widened = recontext(typing.derivation, extra_var, extra_name)
        if not check_derivation(widened, System.SN).ok:
            return _result("weakening", pretty(term), False, "re-contexted derivation rejected")
    return _result("weakening", pretty(term), True)


def check_subject_reduction_all(term: Term, depth: int = 8, width: int = 2, fuel: int = 400) -> dict:
    unknown = 0
    for typing in _sampled(infer(term, System.S, depth, width)):
        for step in redexes(term):
            outcome = check_subject_reduction(typing.derivation, step, fuel, width)
            if outcome.status == SubjectReduction.UNKNOWN:
                unknown += 1
            elif not check_derivation(outcome.derivation, System.S).ok:
                return _result("subject-reduction", pretty(term), False, "re-derived contractum rejected")
    return _result("subject-reduction", pretty(term), True, f"{unknown} unknown")


def check_expansion(redex: Term, fuel: int = 400) -> dict:
    """An SN typing of the contractum expands to one of the redex."""
    reduct = contract(redex, ())
    d = synthesize(reduct, "strong", fuel=fuel)
    if d is None:
        return _result("subject-expansion", pretty(redex), None, "contractum not typed")
    expanded = expand_at(d, redex, (), System.SN, lambda q: synthesize(q, "strong", fuel=fuel))
    if expanded is None:
        return _result("subject-expansion", pretty(redex), None, "operand not typed")
    ok = check_derivation(expanded, System.SN).ok and expanded.type == d.type
    return _result("subject-expansion", pretty(redex), ok)


def check_approximation_theorem(term: Term, depth: int = 8, width: int = 2, fuel: int = 400) -> dict:
    found = approximants(term, 100)
    if not found.complete:
        return _result("approximation-theorem", pretty(term), None, "reduction graph not finite within fuel")
    for typing in _sampled(infer(term, System.S, depth, width)):
        if not any(derive(a, typing.vctx, typing.type, typing.nctx, System.S, fuel, width) for a in found.maximal):
            return _result("approximation-theorem", pretty(term), None, "no approximant derivation found")
    return _result("approximation-theorem", pretty(term), True)


def check_normal_form_typeable(term: Term, depth: int = 8, width: int = 3) -> dict:
    if not is_pure(term) or not is_nf(term):
        return _result("omega-free-normal-forms", pretty(term), None, "not a pure normal form")
    return _result("omega-free-normal-forms", pretty(term), bool(infer(term, System.SN, depth, width)))


def check_characterisations(term: Term, **bounds) -> dict:
    report = classify(term, **bounds)
    ok = not report.disagreements
    return _result("characterisations", pretty(term), ok, ", ".join(report.disagreements))


# ==============================================================================
# HARNESS
# ==============================================================================


def run_properties(count: int = 20, seed: int = 0, size: int = 7) -> pd.DataFrame:
    """Run every check over ``count`` generated instances."""
    rng = make_rng(seed)
    rows: list[dict] = check_rule_examples()
    type_samples = [random_inter(rng, 3) for _ in range(4)] + [random_cont(rng, 3) for _ in range(2)]
    rows.append(check_inclusion_oracle(type_samples))
    inters, conts = enumerate_types(INCLUSION_UNIVERSE_SIZE)
    rows.append(check_inclusion_oracle(inters + conts))
    small_inters, small_conts = enumerate_types(2)
    rows.append(
        check_meets(inters, conts, enumerate_contexts(small_inters), enumerate_contexts(small_conts, ("a", "b")))
    )

    for index in range(count):
        term = random_term(rng, int(rng.integers(1, size + 1)))
        logger.info(f"Instance {index + 1}/{count}: {pretty(term)}")
        for check in (
            check_roundtrip,
            check_confluence,
            check_strategies_agree,
            check_truncation_maximal,
            check_hnf_truncation,
            check_approximants_compatible,
            check_approximants_under_reduction,
            check_join_lub,
            check_join_laws,
            check_approx_preserved,
            check_inference_sound,
            check_bottom_translation,
            check_weakening,
            check_subject_reduction_all,
            check_approximation_theorem,
            check_normal_form_typeable,
        ):
            try:
                rows.append(check(term))
            except LmuError as e:
                logger.warning(f"{check.__name__} failed on {pretty(term)}: {e}")
                rows.append(_result(check.__name__, pretty(term), False, str(e)))
        kind = list(RedexKind)[index % len(RedexKind)]
        rows.append(check_expansion(random_redex(rng, kind, 4)))

    return pd.DataFrame(rows, columns=["property", "subject", "ok", "detail"])
