"""
Syntax Module
=============
Surface syntax for terms and strict types: lark grammars, parsers and the
capture-free pretty printers.

Terms:
    term  := "\\" ident "." term | "mu" ident "." "[" ident "]" term | atom+
    atom  := ident | "bot" | "(" term ")"

Types:
    basic := "(" cont ")" "->" const | const        (a bare const is (O)->const)
    inter := "w" | basic ("&" basic)*
    cont  := "O" | inter | inter "*" cont           (a missing tail is "* O")
"""

import logging
from functools import lru_cache

import lark as L

from lib.strict_types import (
    OMEGA_CONT,
    BasicType,
    ContinuationType,
    IntersectionType,
    NameContext,
    VarContext,
    Context,
    cons,
    inter,
)
from lib.terms import (
    BOT,
    App,
    Bottom,
    Lam,
    LmuError,
    Mu,
    Term,
    Var,
    app,
    fresh_name,
    free_names,
    free_vars,
    lam,
    mu,
)

logger = logging.getLogger(__name__)


class TermSyntaxError(LmuError):
    """Term text does not conform to the grammar."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class TypeSyntaxError(TermSyntaxError):
    """Type text does not conform to the grammar."""


# ==============================================================================
# TERM GRAMMAR
# ==============================================================================

TERM_GRAMMAR = r"""
?term: lam
     | mu
     | app

lam: LAMBDA IDENT "." term
mu: "mu" IDENT "." "[" IDENT "]" term
app: atom+

?atom: IDENT        -> var
     | "bot"        -> bot
     | "(" term ")"

LAMBDA: "\\" | "λ"
IDENT: /(?!(?:mu|bot)(?![A-Za-z0-9_']))[A-Za-z_][A-Za-z0-9_']*/

%import common.WS
%ignore WS
"""


class _TermBuilder(L.Transformer):
    # Binding is resolved by closing each binder over its free occurrences.

    def var(self, children):
        return Var(str(children[0]))

    def bot(self, children):
        return BOT

    def app(self, children):
        return app(*children)

    def lam(self, children):
        _, name, body = children
        return lam(str(name), body)

    def mu(self, children):
        name, target, body = children
        return mu(str(name), str(target), body)


@lru_cache(maxsize=None)
def _term_parser() -> L.Lark:
    return L.Lark(TERM_GRAMMAR, start="term", parser="lalr")


def _syntax_error(cls: type, text: str, error: L.exceptions.UnexpectedInput) -> TermSyntaxError:
    line = getattr(error, "line", 0)
    column = getattr(error, "column", 0)
    if line is None or line < 0:
        line = text.count("\n") + 1
        column = len(text.rsplit("\n", 1)[-1]) + 1
    return cls("Syntax error", line, column)


def parse_term(text: str) -> Term:
    """Parse surface syntax; free variables and free names are allowed."""
    try:
        tree = _term_parser().parse(text)
    except L.exceptions.UnexpectedInput as e:
        raise _syntax_error(TermSyntaxError, text, e) from e
    return _TermBuilder().transform(tree)


parse = parse_term


# ==============================================================================
# TERM PRINTER
# ==============================================================================


def pretty(term: Term) -> str:
    """Named form with minimal parentheses; a binder is renamed only when it would capture."""
    return _pretty(term, [], [], "top")


def _pretty(
    term: Term,
    vars_in_scope: list[str],
    names_in_scope: list[str],
    position: str,
) -> str:
    match term:
        case Var(ref):
            return _lookup(ref, vars_in_scope)
        case Bottom():
            return "bot"
        case Lam(hint, body):
            x = fresh_name(hint, free_vars(term) | set(vars_in_scope))
            text = f"\\{x}.{_pretty(body, vars_in_scope + [x], names_in_scope, 'top')}"
            return text if position == "top" else f"({text})"
        case Mu(hint, target, body):
            a = fresh_name(hint, free_names(term) | set(names_in_scope))
            scope = names_in_scope + [a]
            inner = _pretty(body, vars_in_scope, scope, "top")
            text = f"mu {a}.[{_lookup(target, scope)}] {inner}"
            return text if position == "top" else f"({text})"
        case App(fun, arg):
            text = (
                f"{_pretty(fun, vars_in_scope, names_in_scope, 'fun')} "
                f"{_pretty(arg, vars_in_scope, names_in_scope, 'arg')}"
            )
            return f"({text})" if position == "arg" else text
    raise LmuError(f"Not a term: {term!r}")


def _lookup(ref: int | str, scope: list[str]) -> str:
    if isinstance(ref, str):
        return ref
    if ref >= len(scope):
        raise LmuError(f"Dangling index {ref} while printing")
    return scope[-1 - ref]


# ==============================================================================
# TYPE GRAMMAR
# ==============================================================================

TYPE_GRAMMAR = r"""
inter: "w"                  -> omega
     | basic ("&" basic)*   -> conjunction

basic: "(" cont ")" "->" CONST  -> arrow_type
     | CONST                    -> const_type

cont: "O"                   -> empty_cont
    | inter "*" cont        -> product
    | inter                 -> last_factor

CONST: /'[A-Za-z_][A-Za-z0-9_]*/

%import common.WS
%ignore WS
"""


class _TypeBuilder(L.Transformer):
    def omega(self, children):
        return inter()

    def conjunction(self, children):
        return inter(*children)

    def arrow_type(self, children):
        cont_type, const = children
        return BasicType(cont_type, str(const)[1:])

    def const_type(self, children):
        return BasicType(OMEGA_CONT, str(children[0])[1:])

    def empty_cont(self, children):
        return OMEGA_CONT

    def product(self, children):
        head, rest = children
        return cons(head, rest)

    def last_factor(self, children):
        return cons(children[0], OMEGA_CONT)


@lru_cache(maxsize=None)
def _type_parser() -> L.Lark:
    return L.Lark(TYPE_GRAMMAR, start=["inter", "cont"], parser="lalr")


def parse_type(text: str) -> IntersectionType:
    """Parse an intersection type (a basic type is a singleton intersection)."""
    try:
        tree = _type_parser().parse(text, start="inter")
    except L.exceptions.UnexpectedInput as e:
        raise _syntax_error(TypeSyntaxError, text, e) from e
    return _TypeBuilder().transform(tree)


def parse_cont(text: str) -> ContinuationType:
    try:
        tree = _type_parser().parse(text, start="cont")
    except L.exceptions.UnexpectedInput as e:
        raise _syntax_error(TypeSyntaxError, text, e) from e
    return _TypeBuilder().transform(tree)


# ==============================================================================
# TYPE PRINTER
# ==============================================================================


def format_basic(basic_type: BasicType) -> str:
    return f"({format_cont(basic_type.cont)})->'{basic_type.head}"


def format_type(value: IntersectionType | BasicType) -> str:
    if isinstance(value, BasicType):
        return format_basic(value)
    if value.is_omega:
        return "w"
    return " & ".join(format_basic(b) for b in value.conjuncts)


def format_cont(value: ContinuationType) -> str:
    return " * ".join([format_type(arg) for arg in value.args] + ["O"])


def format_any(value) -> str:
    if isinstance(value, ContinuationType):
        return format_cont(value)
    return format_type(value)


def format_ctx(ctx: Context) -> str:
    if not len(ctx):
        return "{}"
    parts = [f"{key}: {format_any(value)}" for key, value in ctx.items()]
    return "{" + ", ".join(parts) + "}"


def ctx_to_json(ctx: Context) -> dict[str, str]:
    return {key: format_any(value) for key, value in ctx.items()}


def var_ctx_from_json(data: dict[str, str]) -> VarContext:
    return Context.of({key: parse_type(text) for key, text in data.items()})


def name_ctx_from_json(data: dict[str, str]) -> NameContext:
    return Context.of({key: parse_cont(text) for key, text in data.items()})
