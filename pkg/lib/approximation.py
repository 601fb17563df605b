"""
Approximation Module
====================
Approximants of λμ⊥ terms: the grammar check, direct approximation,
truncation, bounded approximant sets, join and the induced semantics.
"""

import logging
from dataclasses import dataclass
from typing import Optional

from lib.reduction import reduction_graph
from lib.syntax import pretty
from lib.terms import BOT, App, Bottom, Lam, LmuError, Mu, Term, Var, app, spine

logger = logging.getLogger(__name__)


# ==============================================================================
# APPROXIMANTS AND DIRECT APPROXIMATION
# ==============================================================================


def is_approximant(term: Term) -> bool:
    match term:
        case Bottom():
            return True
        case Lam(_, body):
            return not isinstance(body, Bottom) and is_approximant(body)
        case Mu(_, _, body):
            return not isinstance(body, (Bottom, Mu)) and is_approximant(body)
    head, args = spine(term)
    return isinstance(head, Var) and all(is_approximant(a) for a in args)


def direct_approx(approx: Term, term: Term) -> bool:
    """approx ⊑ term: equal up to ⊥ standing for arbitrary subterms."""
    match (approx, term):
        case (Bottom(), _):
            return True
        case (Var(x), Var(y)):
            return x == y
        case (Lam(_, a), Lam(_, m)):
            return direct_approx(a, m)
        case (Mu(_, t, a), Mu(_, s, m)):
            return t == s and direct_approx(a, m)
        case (App(f, a), App(g, b)):
            return direct_approx(f, g) and direct_approx(a, b)
    return False


def truncate(term: Term) -> Term:
    """The largest approximant below ``term``."""
    match term:
        case Bottom() | Var():
            return term
        case Lam(hint, body):
            cut = truncate(body)
            return BOT if isinstance(cut, Bottom) else Lam(hint, cut)
        case Mu(hint, target, body):
            if isinstance(body, Mu):
                return BOT
            cut = truncate(body)
            return BOT if isinstance(cut, Bottom) else Mu(hint, target, cut)
    head, args = spine(term)
    if not isinstance(head, Var):
        return BOT
    return app(head, *(truncate(a) for a in args))


# ==============================================================================
# APPROXIMANT SETS
# ==============================================================================


@dataclass(frozen=True)
class ApproxSet:
    """Maximal approximants found within ``fuel`` expansions, sorted by printed form."""

    maximal: tuple[Term, ...]
    fuel: int
    complete: bool = False

    def member(self, approx: Term) -> bool:
        return any(direct_approx(approx, top) for top in self.maximal)


def maximal_elements(candidates: list[Term]) -> list[Term]:
    unique = list(dict.fromkeys(candidates))
    return [
        a
        for a in unique
        if not any(b != a and direct_approx(a, b) for b in unique)
    ]


def approximants(term: Term, fuel: int = 200) -> ApproxSet:
    graph = reduction_graph(term, fuel)
    maximal = maximal_elements([truncate(node) for node in graph.nodes])
    maximal.sort(key=pretty)
    logger.debug(f"{len(maximal)} maximal approximants from {graph.number_of_nodes()} reducts")
    return ApproxSet(tuple(maximal), fuel, bool(graph.graph["complete"]))


def approx_equivalent(left: Term, right: Term, fuel: int = 200) -> bool:
    """Bounded check that both terms have the same approximants."""
    return set(approximants(left, fuel).maximal) == set(approximants(right, fuel).maximal)


# ==============================================================================
# JOIN AND SEMANTICS
# ==============================================================================


def join(left: Term, right: Term) -> Optional[Term]:
    """Least upper bound of compatible terms, None when incompatible."""
    match (left, right):
        case (Bottom(), _):
            return right
        case (_, Bottom()):
            return left
        case (Var(x), Var(y)):
            return left if x == y else None
        case (Lam(hint, a), Lam(_, b)):
            body = join(a, b)
            return None if body is None else Lam(hint, body)
        case (Mu(hint, t, a), Mu(_, s, b)):
            if t != s:
                return None
            body = join(a, b)
            return None if body is None else Mu(hint, t, body)
        case (App(f, a), App(g, b)):
            fun = join(f, g)
            arg = join(a, b) if fun is not None else None
            return None if arg is None else App(fun, arg)
    return None


def compatible(left: Term, right: Term) -> bool:
    return join(left, right) is not None


def join_all(terms: list[Term]) -> Optional[Term]:
    result: Optional[Term] = BOT
    for term in terms:
        if result is None:
            return None
        result = join(result, term)
    return result


def semantics(term: Term, fuel: int = 200) -> Term:
    """Join of every approximant found within ``fuel``."""
    found = approximants(term, fuel).maximal
    result = join_all(list(found))
    if result is None:
        raise LmuError(f"Incompatible approximants for {pretty(term)}")
    return result
