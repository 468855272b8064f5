"""Term and equation data model: grammar, parser, printer, substitution.

The term language has three binary operations over single-letter variables:

* product        -- juxtaposition ("a b", "ab"), with "*" and "." as synonyms
* left division  -- "a:b"
* right division -- "a/b" (numerator on the left)

Grammar (division binds tighter than the product; at most one division per
factor, so chains like ``a:b:c`` need explicit parentheses)::

    equation := term "=" term
    term     := factor { ("*" | "." | nothing) factor }
    factor   := divisee [ (":" | "/") divisee ]
    divisee  := letter | "(" term ")"

``#`` starts a comment running to the end of the line; whitespace is
insignificant.  All values in this module are immutable and hashable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping, Union


class ParseError(ValueError):
    """Raised on malformed input; carries the offending position."""

    def __init__(self, message: str, text: str, pos: int):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} (at position {pos}: {text[pos:pos + 8]!r})")


class Op(Enum):
    """The three operation symbols, in canonical order."""

    PROD = "prod"
    LDIV = "ldiv"
    RDIV = "rdiv"

    @property
    def glyph(self) -> str:
        return {Op.PROD: " ", Op.LDIV: ":", Op.RDIV: "/"}[self]


OP_ORDER = (Op.PROD, Op.LDIV, Op.RDIV)

VARIABLE_ALPHABET = "abcdefghijklmnopqrstuvwxyz"
_VAR_SET = frozenset(VARIABLE_ALPHABET)


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if self.name not in _VAR_SET:
            raise ValueError(f"variable must be a single lowercase letter, got {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    op: Op
    left: "Term"
    right: "Term"

    def __str__(self):
        return format_term(self)


Term = Union[Var, App]

# Assignments map variable names to whatever the use site needs
# (carrier elements during evaluation, terms during substitution).
Assignment = Mapping[str, object]


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def __str__(self):
        return format_equation(self)

    def flipped(self) -> "Equation":
        return Equation(self.rhs, self.lhs)


# ---------------------------------------------------------------------------
# parsing

_PROD_SYNONYMS = ("*", ".")


class _Scanner:
    """Token stream over the raw text; comments and whitespace are skipped."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self._skip()

    def _skip(self):
        text, i = self.text, self.pos
        while i < len(text):
            ch = text[i]
            if ch in " \t\r\n":
                i += 1
            elif ch == "#":
                while i < len(text) and text[i] != "\n":
                    i += 1
            else:
                break
        self.pos = i

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        self._skip()
        return ch


def _parse_divisee(sc: _Scanner) -> Term:
    ch = sc.peek()
    if ch == "(":
        sc.take()
        t = _parse_term(sc)
        if sc.peek() != ")":
            raise ParseError("expected ')'", sc.text, sc.pos)
        sc.take()
        return t
    if ch in _VAR_SET:
        return Var(sc.take())
    if ch == "":
        raise ParseError("unexpected end of input", sc.text, sc.pos)
    raise ParseError(f"unexpected character {ch!r}", sc.text, sc.pos)


def _parse_factor(sc: _Scanner) -> Term:
    left = _parse_divisee(sc)
    ch = sc.peek()
    if ch == ":":
        sc.take()
        return App(Op.LDIV, left, _parse_divisee(sc))
    if ch == "/":
        sc.take()
        return App(Op.RDIV, left, _parse_divisee(sc))
    return left


def _starts_factor(ch: str) -> bool:
    return ch == "(" or ch in _VAR_SET


def _parse_term(sc: _Scanner) -> Term:
    t = _parse_factor(sc)
    while True:
        ch = sc.peek()
        if ch in _PROD_SYNONYMS:
            sc.take()
            if not _starts_factor(sc.peek()):
                raise ParseError("expected a factor after product symbol", sc.text, sc.pos)
            t = App(Op.PROD, t, _parse_factor(sc))
        elif _starts_factor(ch):
            t = App(Op.PROD, t, _parse_factor(sc))
        else:
            return t


def parse_term(text: str) -> Term:
    """Parse ``text`` into a term, or raise ParseError with a position."""
    sc = _Scanner(text)
    t = _parse_term(sc)
    if sc.peek() != "":
        raise ParseError(f"unexpected trailing {sc.peek()!r}", sc.text, sc.pos)
    return t


def parse_equation(text: str) -> Equation:
    """Parse ``lhs = rhs``; exactly one '=' is allowed."""
    sc = _Scanner(text)
    lhs = _parse_term(sc)
    if sc.peek() != "=":
        raise ParseError("expected '=' between the two sides", sc.text, sc.pos)
    sc.take()
    rhs = _parse_term(sc)
    if sc.peek() == "=":
        raise ParseError("more than one '=' in equation", sc.text, sc.pos)
    if sc.peek() != "":
        raise ParseError(f"unexpected trailing {sc.peek()!r}", sc.text, sc.pos)
    return Equation(lhs, rhs)


# ---------------------------------------------------------------------------
# printing

def format_term(t: Term) -> str:
    """Render ``t`` with minimal parentheses; re-parses to an equal term."""
    return _fmt_term(t)


def _fmt_term(t: Term) -> str:
    if isinstance(t, App) and t.op is Op.PROD:
        return f"{_fmt_term(t.left)} {_fmt_factor(t.right)}"
    return _fmt_factor(t)


def _fmt_factor(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if t.op is Op.PROD:
        return f"({_fmt_term(t)})"
    return f"{_fmt_divisee(t.left)}{t.op.glyph}{_fmt_divisee(t.right)}"


def _fmt_divisee(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    return f"({_fmt_term(t)})"


def format_equation(eq: Equation) -> str:
    return f"{format_term(eq.lhs)} = {format_term(eq.rhs)}"


# ---------------------------------------------------------------------------
# structural helpers

def variables_of(t: Term) -> tuple:
    """Distinct variable names in first-occurrence (left-to-right) order."""
    seen: dict = {}

    def walk(u: Term):
        if isinstance(u, Var):
            seen.setdefault(u.name, None)
        else:
            walk(u.left)
            walk(u.right)

    walk(t)
    return tuple(seen)


def variables_of_equation(eq: Equation) -> tuple:
    seen = dict.fromkeys(variables_of(eq.lhs))
    seen.update(dict.fromkeys(variables_of(eq.rhs)))
    return tuple(seen)


def operations_of(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset()
    return frozenset({t.op}) | operations_of(t.left) | operations_of(t.right)


def operations_of_equation(eq: Equation) -> frozenset:
    return operations_of(eq.lhs) | operations_of(eq.rhs)


def term_depth(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    return 1 + max(term_depth(t.left), term_depth(t.right))


def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + term_size(t.left) + term_size(t.right)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        yield from subterms(t.left)
        yield from subterms(t.right)


def substitute(t: Term, s: Mapping[str, Term]) -> Term:
    """Simultaneous substitution; every variable of ``t`` must be bound."""
    if isinstance(t, Var):
        try:
            return s[t.name]
        except KeyError:
            raise KeyError(f"no binding for variable {t.name!r}") from None
    return App(t.op, substitute(t.left, s), substitute(t.right, s))


def term_key(t: Term) -> tuple:
    """Total structural order on terms (variables first, then by operation)."""
    if isinstance(t, Var):
        return (0, t.name)
    return (1, OP_ORDER.index(t.op), term_key(t.left), term_key(t.right))


def equation_key(eq: Equation) -> tuple:
    return (term_key(eq.lhs), term_key(eq.rhs))


def normalize_variables(eq: Equation) -> Equation:
    """Rename variables to a, b, c, ... in first-occurrence order (lhs then rhs)."""
    names = variables_of_equation(eq)
    table = {old: Var(VARIABLE_ALPHABET[i]) for i, old in enumerate(names)}
    return Equation(substitute(eq.lhs, table), substitute(eq.rhs, table))


def canonical_equation(eq: Equation) -> Equation:
    """Canonical form modulo variable renaming and symmetry of '='.

    Both orientations are variable-normalized and the structurally smaller
    (lhs, rhs) pair wins, so a candidate identity has exactly one canonical
    representative.
    """
    fwd = normalize_variables(eq)
    bwd = normalize_variables(eq.flipped())
    return fwd if equation_key(fwd) <= equation_key(bwd) else bwd
