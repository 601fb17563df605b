"""
Terms Module
============
λμ⊥ terms, binding discipline, positions and both substitution forms.

Bound λ-variables and bound μ-names live in two independent de Bruijn
index spaces: ``Var(0)`` is the nearest enclosing λ, a ``Mu`` target ``0``
is the nearest enclosing μ (a μ binder scopes over its own ``[·]`` slot).
Free variables and free names are plain strings. Binder hints are kept for
printing only and take no part in equality, so ``==`` is alpha-equivalence.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Union

logger = logging.getLogger(__name__)


# ==============================================================================
# ERRORS
# ==============================================================================


class LmuError(Exception):
    """Base class for all workbench errors."""


class PositionError(LmuError):
    """A position does not resolve inside a term."""


class NotARedexError(LmuError):
    """Contraction was requested at a position that holds no redex."""


# ==============================================================================
# TERMS
# ==============================================================================

Ref = Union[int, str]


@dataclass(frozen=True)
class Var:
    ref: Ref


@dataclass(frozen=True)
class Lam:
    hint: str = field(compare=False)
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Mu:
    """μα.[β]M: binds a name and sends ``body`` to ``target``."""

    hint: str = field(compare=False)
    target: Ref
    body: "Term"


@dataclass(frozen=True)
class Bottom:
    pass


Term = Union[Var, Lam, App, Mu, Bottom]

BOT = Bottom()

# Child selectors from the root; the empty tuple is the root itself.
Position = tuple[str, ...]
ROOT: Position = ()


def var(name: str) -> Var:
    """Variable node for a free variable."""
    return Var(name)


def app(head: Term, *args: Term) -> Term:
    """Left-nested application ``head a1 ... an``."""
    result = head
    for arg in args:
        result = App(result, arg)
    return result


def spine(term: Term) -> tuple[Term, list[Term]]:
    """Split ``h a1 ... an`` into its head and argument list."""
    args: list[Term] = []
    while isinstance(term, App):
        args.append(term.arg)
        term = term.fun
    args.reverse()
    return term, args


def size(term: Term) -> int:
    """Number of constructors in ``term``."""
    match term:
        case Lam(_, body) | Mu(_, _, body):
            return 1 + size(body)
        case App(fun, arg):
            return 1 + size(fun) + size(arg)
        case _:
            return 1


def is_pure(term: Term) -> bool:
    """True when the term belongs to λμ proper, i.e. contains no ⊥."""
    match term:
        case Bottom():
            return False
        case Lam(_, body) | Mu(_, _, body):
            return is_pure(body)
        case App(fun, arg):
            return is_pure(fun) and is_pure(arg)
        case _:
            return True


# ==============================================================================
# FREE VARIABLES, FREE NAMES, FRESHNESS
# ==============================================================================


def free_vars(term: Term) -> set[str]:
    """Free variables, i.e. the string-named variable occurrences."""
    match term:
        case Var(str(name)):
            return {name}
        case Lam(_, body) | Mu(_, _, body):
            return free_vars(body)
        case App(fun, arg):
            return free_vars(fun) | free_vars(arg)
        case _:
            return set()


def free_names(term: Term) -> set[str]:
    """Free names, i.e. string targets of named terms."""
    match term:
        case Mu(_, target, body):
            names = free_names(body)
            if isinstance(target, str):
                names.add(target)
            return names
        case Lam(_, body):
            return free_names(body)
        case App(fun, arg):
            return free_names(fun) | free_names(arg)
        case _:
            return set()


def binder_hints(term: Term) -> set[str]:
    """Hints of every binder in ``term``."""
    match term:
        case Lam(hint, body) | Mu(hint, _, body):
            return {hint} | binder_hints(body)
        case App(fun, arg):
            return binder_hints(fun) | binder_hints(arg)
        case _:
            return set()


def all_identifiers(term: Term) -> set[str]:
    """Every identifier a reader could see in ``term``: free ones and binder hints."""
    return free_vars(term) | free_names(term) | binder_hints(term)


def fresh_name(hint: str, avoid: set[str] | frozenset[str]) -> str:
    """Smallest primed variant of ``hint`` not in ``avoid``."""
    candidate = hint
    while candidate in avoid:
        candidate += "'"
    return candidate


# ==============================================================================
# INDEX SHIFTING, OPENING, CLOSING
# ==============================================================================


def shift(term: Term, dv: int = 0, dn: int = 0, var_cutoff: int = 0, name_cutoff: int = 0) -> Term:
    """Shift dangling λ-indices by ``dv`` and dangling name indices by ``dn``."""
    if dv == 0 and dn == 0:
        return term
    match term:
        case Var(int(i)) if i >= var_cutoff:
            return Var(i + dv)
        case Lam(hint, body):
            return Lam(hint, shift(body, dv, dn, var_cutoff + 1, name_cutoff))
        case App(fun, arg):
            return App(shift(fun, dv, dn, var_cutoff, name_cutoff), shift(arg, dv, dn, var_cutoff, name_cutoff))
        case Mu(hint, target, body):
            inner = name_cutoff + 1
            if isinstance(target, int) and target >= inner:
                target = target + dn
            return Mu(hint, target, shift(body, dv, dn, var_cutoff, inner))
        case _:
            return term


def instantiate_var(body: Term, value: Term, level: int = 0, name_level: int = 0) -> Term:
    """Replace λ-index ``level`` by ``value`` and drop that binder from the index space."""
    match body:
        case Var(int(i)):
            if i == level:
                return shift(value, level, name_level)
            if i > level:
                return Var(i - 1)
            return body
        case Lam(hint, inner):
            return Lam(hint, instantiate_var(inner, value, level + 1, name_level))
        case App(fun, arg):
            return App(instantiate_var(fun, value, level, name_level), instantiate_var(arg, value, level, name_level))
        case Mu(hint, target, inner):
            return Mu(hint, target, instantiate_var(inner, value, level, name_level + 1))
        case _:
            return body


def _instantiate_ref(ref: Ref, replacement: Ref, level: int) -> Ref:
    if not isinstance(ref, int):
        return ref
    if ref == level:
        return replacement + level if isinstance(replacement, int) else replacement
    if ref > level:
        return ref - 1
    return ref


def instantiate_name(body: Term, replacement: Ref, level: int = 0) -> Term:
    """Replace name index ``level`` by ``replacement`` and drop that binder.

    An integer replacement is read relative to the scope outside the dropped
    binder.
    """
    match body:
        case Mu(hint, target, inner):
            return Mu(
                hint,
                _instantiate_ref(target, replacement, level + 1),
                instantiate_name(inner, replacement, level + 1),
            )
        case Lam(hint, inner):
            return Lam(hint, instantiate_name(inner, replacement, level))
        case App(fun, arg):
            return App(instantiate_name(fun, replacement, level), instantiate_name(arg, replacement, level))
        case _:
            return body


def open_lam(term: Lam, name: str) -> Term:
    """Body of ``term`` with its bound variable made free as ``name``."""
    return instantiate_var(term.body, Var(name))


def open_mu(term: Mu, name: str) -> tuple[Ref, Term]:
    """Target and body of ``term`` with its bound name made free as ``name``."""
    return _instantiate_ref(term.target, name, 0), instantiate_name(term.body, name)


def close_var(term: Term, name: str, level: int = 0) -> Term:
    """Turn free occurrences of ``name`` into indices bound at ``level``."""
    match term:
        case Var(str(x)) if x == name:
            return Var(level)
        case Var(int(i)) if i >= level:
            return Var(i + 1)
        case Lam(hint, body):
            return Lam(hint, close_var(body, name, level + 1))
        case App(fun, arg):
            return App(close_var(fun, name, level), close_var(arg, name, level))
        case Mu(hint, target, body):
            return Mu(hint, target, close_var(body, name, level))
        case _:
            return term


def _close_ref(ref: Ref, name: str, level: int) -> Ref:
    if ref == name:
        return level
    if isinstance(ref, int) and ref >= level:
        return ref + 1
    return ref


def close_name(term: Term, name: str, level: int = 0) -> Term:
    """Turn free targets ``name`` into name indices bound at ``level``."""
    match term:
        case Mu(hint, target, body):
            return Mu(hint, _close_ref(target, name, level + 1), close_name(body, name, level + 1))
        case Lam(hint, body):
            return Lam(hint, close_name(body, name, level))
        case App(fun, arg):
            return App(close_name(fun, name, level), close_name(arg, name, level))
        case _:
            return term


def lam(name: str, body: Term) -> Lam:
    """Bind free variable ``name`` of ``body``."""
    return Lam(name, close_var(body, name))


def mu(name: str, target: str, body: Term) -> Mu:
    """Build μname.[target]body, binding free name ``name``."""
    return Mu(name, _close_ref(target, name, 0), close_name(body, name))


# ==============================================================================
# SUBSTITUTIONS
# ==============================================================================


def subst_term(term: Term, name: str, value: Term, level: int = 0, name_level: int = 0) -> Term:
    """Capture-avoiding term[value/name] for a free variable ``name``."""
    match term:
        case Var(str(x)) if x == name:
            return shift(value, level, name_level)
        case Lam(hint, body):
            return Lam(hint, subst_term(body, name, value, level + 1, name_level))
        case App(fun, arg):
            return App(
                subst_term(fun, name, value, level, name_level),
                subst_term(arg, name, value, level, name_level),
            )
        case Mu(hint, target, body):
            return Mu(hint, target, subst_term(body, name, value, level, name_level + 1))
        case _:
            return term


def _matches(target: Ref, wanted: Ref, name_level: int) -> bool:
    if isinstance(wanted, int):
        return isinstance(target, int) and target == wanted + name_level
    return target == wanted


def struct_subst(
    term: Term,
    alpha: Ref,
    operand: Term,
    gamma: Ref,
    level: int = 0,
    name_level: int = 0,
) -> Term:
    """term[operand·gamma/alpha]: each [alpha]N becomes [gamma](N' operand).

    Integer ``alpha``/``gamma`` are name indices relative to the starting
    scope; ``operand`` is read relative to that scope as well.
    """
    match term:
        case Mu(hint, target, body):
            inner = name_level + 1
            new_body = struct_subst(body, alpha, operand, gamma, level, inner)
            if _matches(target, alpha, inner):
                new_target = gamma + inner if isinstance(gamma, int) else gamma
                return Mu(hint, new_target, App(new_body, shift(operand, level, inner)))
            return Mu(hint, target, new_body)
        case Lam(hint, body):
            return Lam(hint, struct_subst(body, alpha, operand, gamma, level + 1, name_level))
        case App(fun, arg):
            return App(
                struct_subst(fun, alpha, operand, gamma, level, name_level),
                struct_subst(arg, alpha, operand, gamma, level, name_level),
            )
        case _:
            return term


def subst_struct(term: Term, alpha: str, operand: Term, gamma: str) -> Term:
    """Structural substitution M[L·γ/α] on free names; ``gamma`` must be fresh."""
    return struct_subst(term, alpha, operand, gamma)


def rename_name(term: Term, old: str, new: str) -> Term:
    """M[new/old] on free name occurrences."""
    match term:
        case Mu(hint, target, body):
            return Mu(hint, new if target == old else target, rename_name(body, old, new))
        case Lam(hint, body):
            return Lam(hint, rename_name(body, old, new))
        case App(fun, arg):
            return App(rename_name(fun, old, new), rename_name(arg, old, new))
        case _:
            return term


def alpha_eq(left: Term, right: Term) -> bool:
    return left == right


# ==============================================================================
# POSITIONS
# ==============================================================================


def subterm_at(term: Term, position: Position) -> Term:
    """The subterm at ``position``; PositionError when it does not resolve."""
    current = term
    for step in position:
        match (step, current):
            case ("fun", App(fun, _)):
                current = fun
            case ("arg", App(_, arg)):
                current = arg
            case ("body", Lam(_, body) | Mu(_, _, body)):
                current = body
            case _:
                raise PositionError(f"Position {format_position(position)} does not resolve at '{step}'")
    return current


def replace_at(term: Term, position: Position, new: Term) -> Term:
    """Copy of ``term`` with the subterm at ``position`` replaced by ``new``."""
    if not position:
        return new
    step, rest = position[0], position[1:]
    match (step, term):
        case ("fun", App(fun, arg)):
            return App(replace_at(fun, rest, new), arg)
        case ("arg", App(fun, arg)):
            return App(fun, replace_at(arg, rest, new))
        case ("body", Lam(hint, body)):
            return Lam(hint, replace_at(body, rest, new))
        case ("body", Mu(hint, target, body)):
            return Mu(hint, target, replace_at(body, rest, new))
    raise PositionError(f"Position {format_position(position)} does not resolve at '{step}'")


def format_position(position: Position) -> str:
    """Print a position as dotted steps, ``root`` for the empty one."""
    return ".".join(position) if position else "root"


def parse_position(text: str) -> Position:
    """Parse a dotted position such as ``fun.arg``."""
    if text in ("", "root"):
        return ROOT
    steps = tuple(text.split("."))
    for step in steps:
        if step not in ("fun", "arg", "body"):
            raise PositionError(f"Unknown selector '{step}' in position '{text}'")
    return steps
