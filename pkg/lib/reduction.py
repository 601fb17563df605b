"""
Reduction Module
================
One-step βμ reduction (β, μ in both cases, Ren), redex discovery,
strategies, normal-form predicates and reduction graphs.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import networkx as nx
import numpy as np

from lib.terms import (
    App,
    Lam,
    LmuError,
    Mu,
    NotARedexError,
    Position,
    Term,
    Var,
    all_identifiers,
    fresh_name,
    format_position,
    instantiate_name,
    instantiate_var,
    replace_at,
    shift,
    spine,
    struct_subst,
    subterm_at,
)

logger = logging.getLogger(__name__)


class RedexKind(str, Enum):
    BETA = "Beta"
    MU_NAMED = "MuNamed"
    MU_OTHER = "MuOther"
    REN = "Ren"


class ReductionStatus(str, Enum):
    NORMAL = "Normal"
    FUEL_EXHAUSTED = "FuelExhausted"


class Strategy(str, Enum):
    LOR = "lor"
    RIGHTMOST_INNERMOST = "rightmost-innermost"
    RANDOM = "random"


class SNStatus(str, Enum):
    SN = "SN"
    NOT_SN = "NotSN"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Step:
    position: Position
    kind: RedexKind
    term: Term


@dataclass(frozen=True)
class ReductionOutcome:
    status: ReductionStatus
    final: Term
    steps: tuple[Step, ...] = ()


@dataclass(frozen=True)
class SNVerdict:
    status: SNStatus
    max_path: Optional[int] = None
    cycle: tuple[Term, ...] = field(default=())


# ==============================================================================
# REDEXES AND CONTRACTION
# ==============================================================================


def redex_kind(term: Term) -> Optional[RedexKind]:
    match term:
        case App(Lam(), _):
            return RedexKind.BETA
        case App(Mu(_, 0, _), _):
            return RedexKind.MU_NAMED
        case App(Mu(), _):
            return RedexKind.MU_OTHER
        case Mu(_, _, Mu()):
            return RedexKind.REN
    return None


def redexes(term: Term) -> list[tuple[Position, RedexKind]]:
    """All redex positions, leftmost-outermost first."""
    found: list[tuple[Position, RedexKind]] = []

    def visit(node: Term, position: Position) -> None:
        kind = redex_kind(node)
        if kind is not None:
            found.append((position, kind))
        match node:
            case App(fun, arg):
                visit(fun, position + ("fun",))
                visit(arg, position + ("arg",))
            case Lam(_, body) | Mu(_, _, body):
                visit(body, position + ("body",))

    visit(term, ())
    return found


def contract_redex(redex: Term) -> Term:
    """Contract a redex at the root of ``redex``."""
    match redex:
        case App(Lam(_, body), arg):
            return instantiate_var(body, arg)
        case App(Mu(hint, target, body), operand):
            # The new binder takes the place of the consumed one, so both
            # share index 0; only the operand moves under one more μ.
            gamma = fresh_name(hint, all_identifiers(redex))
            lifted = shift(operand, 0, 1)
            rewired = struct_subst(body, 0, lifted, 0)
            if target == 0:
                return Mu(gamma, 0, App(rewired, lifted))
            return Mu(gamma, target, rewired)
        case Mu(hint, outer_target, Mu(_, inner_target, body)):
            if inner_target == 0:
                new_target = outer_target
            elif isinstance(inner_target, int):
                new_target = inner_target - 1
            else:
                new_target = inner_target
            return Mu(hint, new_target, instantiate_name(body, outer_target))
    raise NotARedexError("Term is not a redex")


def contract(term: Term, position: Position) -> Term:
    sub = subterm_at(term, position)
    if redex_kind(sub) is None:
        raise NotARedexError(f"No redex at {format_position(position)}")
    return replace_at(term, position, contract_redex(sub))


def lor_redex(term: Term) -> Optional[tuple[Position, RedexKind]]:
    found = redexes(term)
    return found[0] if found else None


def step_lor(term: Term) -> Optional[Term]:
    """Contract the leftmost-outermost redex, or None on a normal form."""
    found = lor_redex(term)
    if found is None:
        return None
    return contract(term, found[0])


# ==============================================================================
# STRATEGIES
# ==============================================================================


def _innermost(found: list[tuple[Position, RedexKind]]) -> list[tuple[Position, RedexKind]]:
    positions = [p for p, _ in found]
    return [
        (p, k)
        for p, k in found
        if not any(len(q) > len(p) and q[: len(p)] == p for q in positions)
    ]


def choose_redex(
    found: list[tuple[Position, RedexKind]],
    strategy: Strategy,
    rng: Optional[np.random.Generator] = None,
) -> tuple[Position, RedexKind]:
    if strategy == Strategy.LOR:
        return found[0]
    if strategy == Strategy.RIGHTMOST_INNERMOST:
        return _innermost(found)[-1]
    if rng is None:
        raise LmuError("Random strategy needs a generator")
    return found[int(rng.integers(len(found)))]


def normalize(
    term: Term,
    strategy: Strategy | str = Strategy.LOR,
    fuel: int = 1000,
    seed: Optional[int] = None,
) -> ReductionOutcome:
    """Iterate ``strategy`` for at most ``fuel`` steps."""
    strategy = Strategy(strategy)
    if fuel < 0:
        raise LmuError("Fuel must be non-negative")
    rng = None
    if strategy == Strategy.RANDOM:
        if seed is None:
            raise LmuError("The random strategy requires a seed")
        rng = np.random.default_rng(seed)

    current = term
    steps: list[Step] = []
    for _ in range(fuel):
        found = redexes(current)
        if not found:
            break
        position, kind = choose_redex(found, strategy, rng)
        current = contract(current, position)
        steps.append(Step(position, kind, current))
        logger.debug(f"{len(steps)} {kind.value} @{format_position(position)}")

    status = ReductionStatus.NORMAL if is_nf(current) else ReductionStatus.FUEL_EXHAUSTED
    return ReductionOutcome(status, current, tuple(steps))


def replay(term: Term, steps: tuple[Step, ...] | list[Step]) -> Term:
    current = term
    for step in steps:
        current = contract(current, step.position)
    return current


# ==============================================================================
# NORMAL FORMS
# ==============================================================================


def is_nf(term: Term) -> bool:
    return not redexes(term)


def is_hnf(term: Term) -> bool:
    match term:
        case Lam(_, body):
            return is_hnf(body)
        case Mu(_, _, body):
            return not isinstance(body, Mu) and is_hnf(body)
    head, _ = spine(term)
    return isinstance(head, Var)


def head_normalize(term: Term, fuel: int = 1000) -> tuple[Optional[Term], list[Step]]:
    """Contract head redexes until a head normal form appears.

    The leftmost-outermost redex of a term that is not in head normal form
    is its head redex. Returns None as the term when ``fuel`` runs out.
    """
    current = term
    steps: list[Step] = []
    for _ in range(fuel + 1):
        if is_hnf(current):
            return current, steps
        found = lor_redex(current)
        if found is None or len(steps) == fuel:
            break
        position, kind = found
        current = contract(current, position)
        steps.append(Step(position, kind, current))
    return None, steps


# ==============================================================================
# REDUCTION GRAPHS
# ==============================================================================


def reduction_graph(term: Term, fuel: int = 200) -> nx.MultiDiGraph:
    """Breadth-first reduction graph; ``fuel`` bounds the number of expanded nodes.

    Nodes are terms (equality is alpha-equivalence); edges are keyed by the
    redex position and carry its kind. ``graph.graph["complete"]`` tells
    whether every node was expanded.
    """
    graph = nx.MultiDiGraph(root=term)
    graph.add_node(term, expanded=False)
    queue: deque[Term] = deque([term])
    expansions = 0
    while queue and expansions < fuel:
        node = queue.popleft()
        for position, kind in redexes(node):
            successor = contract(node, position)
            if successor not in graph:
                graph.add_node(successor, expanded=False)
                queue.append(successor)
            graph.add_edge(node, successor, key=format_position(position), kind=kind, position=position)
        graph.nodes[node]["expanded"] = True
        expansions += 1
    graph.graph["complete"] = not queue
    logger.debug(f"Reduction graph: {graph.number_of_nodes()} nodes, complete={graph.graph['complete']}")
    return graph


def graph_leaves(graph: nx.MultiDiGraph) -> list[Term]:
    """Expanded nodes without successors, i.e. the normal forms reached."""
    return [n for n, data in graph.nodes(data=True) if data["expanded"] and graph.out_degree(n) == 0]


def rejoins(graph: nx.MultiDiGraph, left: Term, right: Term) -> bool:
    left_reach = nx.descendants(graph, left) | {left}
    right_reach = nx.descendants(graph, right) | {right}
    return bool(left_reach & right_reach)


def find_cycle(graph: nx.MultiDiGraph, source: Term) -> tuple[Term, ...]:
    try:
        edges = nx.find_cycle(graph, source=source)
    except nx.NetworkXNoCycle:
        return ()
    return tuple(edge[0] for edge in edges) + (edges[0][0],)


def is_sn(term: Term, fuel: int = 200) -> SNVerdict:
    """SN when the fully explored graph is acyclic, NotSN on a proven cycle."""
    graph = reduction_graph(term, fuel)
    cycle = find_cycle(graph, term)
    if cycle:
        return SNVerdict(SNStatus.NOT_SN, cycle=cycle)
    if graph.graph["complete"]:
        return SNVerdict(SNStatus.SN, max_path=int(nx.dag_longest_path_length(graph)))
    return SNVerdict(SNStatus.UNKNOWN)
