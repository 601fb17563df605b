"""
Generate Module
===============
Seeded random terms, types and redex instances for the property harness,
and exhaustive enumerations of small types and contexts.
"""

import itertools
import logging
from typing import Optional, Sequence

import numpy as np

from lib.reduction import RedexKind
from lib.strict_types import (
    OMEGA,
    OMEGA_CONT,
    BasicType,
    Context,
    ContinuationType,
    IntersectionType,
    inter,
)
from lib.terms import BOT, App, Term, Var, lam, mu

logger = logging.getLogger(__name__)


def make_rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)


def _pick(rng: np.random.Generator, items: Sequence):
    return items[int(rng.integers(len(items)))]


# ==============================================================================
# TERMS
# ==============================================================================


def random_term(
    rng: np.random.Generator,
    size: int = 8,
    pure: bool = True,
    free_vars: Sequence[str] = ("x", "y"),
    free_names: Sequence[str] = ("a",),
) -> Term:
    """A term of about ``size`` constructors over the given free identifiers."""

    def build(budget: int, scope_vars: list[str], scope_names: list[str]) -> Term:
        if budget <= 1:
            if not pure and rng.random() < 0.2:
                return BOT
            return Var(_pick(rng, scope_vars))
        roll = rng.random()
        if roll < 0.3:
            x = f"v{len(scope_vars)}"
            return lam(x, build(budget - 1, scope_vars + [x], scope_names))
        if roll < 0.5:
            a = f"n{len(scope_names)}"
            target = _pick(rng, scope_names + [a])
            return mu(a, target, build(budget - 1, scope_vars, scope_names + [a]))
        left = int(rng.integers(1, budget))
        right = max(1, budget - 1 - left)
        return App(build(left, scope_vars, scope_names), build(right, scope_vars, scope_names))

    return build(size, list(free_vars), list(free_names))


def random_terms(seed: Optional[int], count: int, size: int = 8, pure: bool = True) -> list[Term]:
    rng = make_rng(seed)
    return [random_term(rng, int(rng.integers(1, size + 1)), pure) for _ in range(count)]


def random_redex(rng: np.random.Generator, kind: RedexKind | str, size: int = 5) -> Term:
    """A redex of the given kind whose parts are random terms."""
    kind = RedexKind(kind)
    body = random_term(rng, size, free_vars=("x", "y"), free_names=("b", "a"))
    operand = random_term(rng, max(1, size // 2), free_vars=("y", "z"), free_names=("a",))
    match kind:
        case RedexKind.BETA:
            return App(lam("x", body), operand)
        case RedexKind.MU_NAMED:
            return App(mu("b", "b", body), operand)
        case RedexKind.MU_OTHER:
            return App(mu("b", "a", body), operand)
        case RedexKind.REN:
            target = _pick(rng, ["b", "g", "a"])
            return mu("b", _pick(rng, ["b", "a"]), mu("g", target, body))


# ==============================================================================
# TYPES
# ==============================================================================


def random_basic(
    rng: np.random.Generator,
    size: int = 4,
    constants: Sequence[str] = ("p", "q"),
    width: int = 2,
) -> BasicType:
    if size <= 1:
        return BasicType(ContinuationType(), _pick(rng, constants))
    length = int(rng.integers(0, width + 1))
    share = max(1, (size - 1) // max(1, length))
    args = tuple(random_inter(rng, share, constants, width) for _ in range(length))
    return BasicType(ContinuationType(args), _pick(rng, constants))


def random_inter(
    rng: np.random.Generator,
    size: int = 4,
    constants: Sequence[str] = ("p", "q"),
    width: int = 2,
) -> IntersectionType:
    count = int(rng.integers(0, width + 1))
    return inter(*(random_basic(rng, size - 1, constants, width) for _ in range(count)))


def random_cont(
    rng: np.random.Generator,
    size: int = 4,
    constants: Sequence[str] = ("p", "q"),
    width: int = 2,
) -> ContinuationType:
    length = int(rng.integers(0, width + 1))
    return ContinuationType(tuple(random_inter(rng, size - 1, constants, width) for _ in range(length)))


# ==============================================================================
# EXHAUSTIVE TYPES
# ==============================================================================


def enumerate_types(
    max_size: int = 5,
    constants: Sequence[str] = ("p", "q"),
) -> tuple[list[IntersectionType], list[ContinuationType]]:
    """Every intersection and continuation type of at most ``max_size`` symbols.

    S1 × ... × Sn × Ω → ψ is read as S1 → ... → Sn → ψ, so a basic type counts
    its constant, its n arrows and its arguments. ω counts one and each & one
    more. Smallest first.
    """
    basics: dict[int, list[BasicType]] = {}
    inters: dict[int, list[IntersectionType]] = {}
    conts: dict[int, list[ContinuationType]] = {0: [OMEGA_CONT]}
    for n in range(1, max_size + 1):
        basics[n] = [BasicType(c, h) for c in conts[n - 1] for h in constants]
        sized = [(k, b) for k in range(1, n + 1) for b in basics[k]]
        found = [OMEGA] if n == 1 else []
        for count in range(1, (n + 1) // 2 + 1):
            for combo in itertools.combinations(sized, count):
                if sum(k for k, _ in combo) + count - 1 == n:
                    found.append(inter(*(b for _, b in combo)))
        inters[n] = list(dict.fromkeys(found))
        conts[n] = [
            ContinuationType((arg,) + rest.args)
            for k in range(1, n)
            for arg in inters[k]
            for rest in conts[n - 1 - k]
        ]
    all_inters = [t for n in range(1, max_size + 1) for t in inters[n]]
    all_conts = [c for n in range(max_size + 1) for c in conts[n]]
    logger.debug(f"{len(all_inters)} intersections, {len(all_conts)} continuations up to size {max_size}")
    return all_inters, all_conts


def enumerate_contexts(
    values: Sequence[IntersectionType | ContinuationType],
    keys: Sequence[str] = ("x", "y"),
) -> list[Context]:
    """Every context over ``keys`` binding each key to one of ``values`` or leaving it out."""
    return [
        Context.of({k: v for k, v in zip(keys, choice) if v is not None})
        for choice in itertools.product([None, *values], repeat=len(keys))
    ]
