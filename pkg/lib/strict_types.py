"""
Strict Types Module
===================
Basic, intersection and continuation types, the inclusion relation,
ω-freeness, and intersections of types and contexts.

    basic         A ::= C -> ψ
    intersection  S ::= A1 ∩ ... ∩ An      (n = 0 is ω)
    continuation  C ::= Ω | S × C
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Generic, Iterable, Mapping, TypeVar, Union

from lib.terms import LmuError

logger = logging.getLogger(__name__)


# ==============================================================================
# TYPES
# ==============================================================================


@dataclass(frozen=True)
class BasicType:
    cont: "ContinuationType"
    head: str


@dataclass(frozen=True)
class IntersectionType:
    """Canonical duplicate-free, ordered set of basic types; empty is ω."""

    conjuncts: tuple[BasicType, ...] = ()

    def __post_init__(self) -> None:
        canonical = tuple(sorted(set(self.conjuncts), key=basic_key))
        object.__setattr__(self, "conjuncts", canonical)

    @property
    def is_omega(self) -> bool:
        return not self.conjuncts


@dataclass(frozen=True)
class ContinuationType:
    """S1 × ... × Sn × Ω; the empty sequence is Ω."""

    args: tuple[IntersectionType, ...] = ()


AnyType = Union[BasicType, IntersectionType, ContinuationType]


def basic_key(basic: BasicType) -> tuple:
    """Sort key putting conjuncts in canonical order."""
    return (basic.head, tuple(inter_key(arg) for arg in basic.cont.args))


def inter_key(inter: IntersectionType) -> tuple:
    return tuple(basic_key(b) for b in inter.conjuncts)


def cont_key(cont: ContinuationType) -> tuple:
    return tuple(inter_key(arg) for arg in cont.args)


OMEGA = IntersectionType()
OMEGA_CONT = ContinuationType()


# ==============================================================================
# CONSTRUCTORS
# ==============================================================================


def as_inter(value: BasicType | IntersectionType) -> IntersectionType:
    """Wrap a basic type as a singleton intersection."""
    if isinstance(value, BasicType):
        return IntersectionType((value,))
    return value


def inter(*parts: BasicType | IntersectionType) -> IntersectionType:
    """Canonical intersection of the given types."""
    conjuncts: list[BasicType] = []
    for part in parts:
        conjuncts.extend(as_inter(part).conjuncts)
    return IntersectionType(tuple(conjuncts))


def cont(*args: BasicType | IntersectionType) -> ContinuationType:
    """Continuation type of the given arguments."""
    return ContinuationType(tuple(as_inter(a) for a in args))


def basic(head: str, *args: BasicType | IntersectionType) -> BasicType:
    """``basic('p', S1, S2)`` is S1 × S2 × Ω -> 'p."""
    return BasicType(cont(*args), head)


def arrow(arg: IntersectionType, rest: ContinuationType, head: str) -> BasicType:
    """S × C -> ψ."""
    return BasicType(ContinuationType((arg,) + rest.args), head)


def cons(arg: IntersectionType, rest: ContinuationType) -> ContinuationType:
    """Prepend ``arg`` to a continuation."""
    return ContinuationType((arg,) + rest.args)


def single_basic(inter_type: IntersectionType) -> BasicType | None:
    """The only conjunct when ``inter_type`` is a basic type, else None."""
    if len(inter_type.conjuncts) == 1:
        return inter_type.conjuncts[0]
    return None


# ==============================================================================
# INCLUSION
# ==============================================================================


def subtype_basic(left: BasicType, right: BasicType) -> bool:
    # No rule relates two distinct basic types.
    return left == right


def subtype_inter(left: IntersectionType, right: IntersectionType) -> bool:
    """S ≤ T: every conjunct of T is a conjunct of S."""
    return all(any(subtype_basic(a, b) for a in left.conjuncts) for b in right.conjuncts)


def subtype_cont(left: ContinuationType, right: ContinuationType) -> bool:
    """C ≤ D: D is Ω, or both are products and compare componentwise."""
    if len(right.args) > len(left.args):
        return False
    return all(subtype_inter(s, t) for s, t in zip(left.args, right.args))


def type_leq(left: AnyType, right: AnyType) -> bool:
    """Inclusion between two types of the same kind."""
    if isinstance(left, ContinuationType) and isinstance(right, ContinuationType):
        return subtype_cont(left, right)
    if isinstance(left, ContinuationType) or isinstance(right, ContinuationType):
        raise LmuError("Cannot compare a continuation type with an intersection type")
    return subtype_inter(as_inter(left), as_inter(right))


# ==============================================================================
# INTERSECTIONS
# ==============================================================================


def inter_types(left: IntersectionType, right: IntersectionType) -> IntersectionType:
    """Meet of two intersections: the union of their conjuncts."""
    return IntersectionType(left.conjuncts + right.conjuncts)


def inter_cont(left: ContinuationType, right: ContinuationType) -> ContinuationType:
    """Meet of two continuations: componentwise meets, the longer tail kept."""
    shorter, longer = (left, right) if len(left.args) <= len(right.args) else (right, left)
    n = len(shorter.args)
    meets = tuple(inter_types(s, t) for s, t in zip(left.args[:n], right.args[:n]))
    return ContinuationType(meets + longer.args[n:])


def _conjunct_subsets(inter_type: IntersectionType) -> list[IntersectionType]:
    conj = inter_type.conjuncts
    return [
        IntersectionType(tuple(c for i, c in enumerate(conj) if mask >> i & 1))
        for mask in range((1 << len(conj)) - 1, -1, -1)
    ]


def weaker_conts(base: ContinuationType, limit: int = 64) -> list[ContinuationType]:
    """Continuations D with base ≤ D, strongest first, at most ``limit`` of them."""
    found: list[ContinuationType] = []

    def walk(length: int, acc: tuple[IntersectionType, ...]) -> None:
        if len(found) >= limit:
            return
        if len(acc) == length:
            found.append(ContinuationType(acc))
            return
        for choice in _conjunct_subsets(base.args[len(acc)]):
            walk(length, acc + (choice,))

    for length in range(len(base.args), -1, -1):
        walk(length, ())
    return found


# ==============================================================================
# OMEGA-FREENESS AND MEASURES
# ==============================================================================


def omega_free(value: "AnyType | Context") -> bool:
    """True when ω occurs nowhere in ``value``."""
    match value:
        case BasicType(cont_type, _):
            return omega_free(cont_type)
        case IntersectionType(conjuncts):
            return bool(conjuncts) and all(omega_free(b) for b in conjuncts)
        case ContinuationType(args):
            return all(omega_free(a) for a in args)
        case Context():
            return all(omega_free(t) for _, t in value.items())
    raise LmuError(f"Not a type: {value!r}")


def type_width(value: AnyType) -> int:
    """Largest intersection arity or continuation length occurring in ``value``."""
    match value:
        case BasicType(cont_type, _):
            return type_width(cont_type)
        case IntersectionType(conjuncts):
            return max([len(conjuncts)] + [type_width(b) for b in conjuncts])
        case ContinuationType(args):
            return max([len(args)] + [type_width(a) for a in args])
    raise LmuError(f"Not a type: {value!r}")


def type_size(value: AnyType) -> int:
    """Number of type constants in ``value``, with ω counting one."""
    match value:
        case BasicType(cont_type, _):
            return 1 + type_size(cont_type)
        case IntersectionType(conjuncts):
            return sum(type_size(b) for b in conjuncts) or 1
        case ContinuationType(args):
            return sum(type_size(a) for a in args)
    raise LmuError(f"Not a type: {value!r}")


def type_constants(value: AnyType) -> set[str]:
    """Type constants occurring in ``value``."""
    match value:
        case BasicType(cont_type, head):
            return {head} | type_constants(cont_type)
        case IntersectionType(conjuncts):
            return set().union(*(type_constants(b) for b in conjuncts))
        case ContinuationType(args):
            return set().union(*(type_constants(a) for a in args))
    raise LmuError(f"Not a type: {value!r}")


# ==============================================================================
# CONTEXTS
# ==============================================================================

T = TypeVar("T", IntersectionType, ContinuationType)


@dataclass(frozen=True)
class Context(Generic[T]):
    """Finite map from subjects to types; each subject bound once."""

    bindings: tuple[tuple[str, T], ...] = ()

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.bindings, key=lambda kv: kv[0]))
        keys = [k for k, _ in ordered]
        if len(set(keys)) != len(keys):
            raise LmuError(f"Subject bound more than once in context: {keys}")
        object.__setattr__(self, "bindings", ordered)

    @classmethod
    def of(cls, mapping: Mapping[str, T] | Iterable[tuple[str, T]] = ()) -> "Context[T]":
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        return cls(tuple(items))

    def get(self, key: str) -> T | None:
        for k, v in self.bindings:
            if k == key:
                return v
        return None

    def __contains__(self, key: object) -> bool:
        return any(k == key for k, _ in self.bindings)

    def __len__(self) -> int:
        return len(self.bindings)

    def keys(self) -> list[str]:
        return [k for k, _ in self.bindings]

    def items(self) -> list[tuple[str, T]]:
        return list(self.bindings)

    def extend(self, key: str, value: T) -> "Context[T]":
        if key in self:
            raise LmuError(f"Subject '{key}' is already bound")
        return Context(self.bindings + ((key, value),))

    def remove(self, key: str) -> "Context[T]":
        return Context(tuple((k, v) for k, v in self.bindings if k != key))

    def restrict(self, keys: Iterable[str]) -> "Context[T]":
        wanted = set(keys)
        return Context(tuple((k, v) for k, v in self.bindings if k in wanted))


VarContext = Context[IntersectionType]
NameContext = Context[ContinuationType]

EMPTY_CTX: Context = Context()


def _meet(left: Context, right: Context, combine: Callable) -> Context:
    merged = dict(left.items())
    for key, value in right.items():
        merged[key] = combine(merged[key], value) if key in merged else value
    return Context.of(merged)


def inter_ctx(left: VarContext, right: VarContext) -> VarContext:
    """Pointwise meet of variable contexts."""
    return _meet(left, right, inter_types)


def inter_name_ctx(left: NameContext, right: NameContext) -> NameContext:
    """Pointwise meet of name contexts."""
    return _meet(left, right, inter_cont)


def ctx_leq(smaller: VarContext, larger: VarContext) -> bool:
    """Γ′ ≤ Γ iff every x:S in Γ has some x:T in Γ′ with T ≤ S."""
    for key, wanted in larger.items():
        have = smaller.get(key)
        if have is None or not subtype_inter(have, wanted):
            return False
    return True


def name_ctx_leq(smaller: NameContext, larger: NameContext) -> bool:
    """Same orientation as ``ctx_leq``, over continuation types."""
    for key, wanted in larger.items():
        have = smaller.get(key)
        if have is None or not subtype_cont(have, wanted):
            return False
    return True
