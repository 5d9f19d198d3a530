"""Quantified Boolean formulas: AST, parser, printer.

Surface syntax: a nonempty `forall x.` / `exists y.` prefix followed by a
matrix over `&`, `|`, `!` and parentheses, e.g.

    forall x. exists y. (x | y) & (!x | !y)

`&` binds tighter than `|`, `!` tighter than both; both binary connectives
associate to the left.  A QBF is closed by construction: every matrix
variable must appear in the prefix.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Union

from .syntax import ParseError


class Quantifier(enum.Enum):
    FORALL = "forall"
    EXISTS = "exists"


@dataclass(frozen=True)
class BoolVar:
    name: str


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


Formula = Union[BoolVar, Not, And, Or]


def formula_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, BoolVar):
        return frozenset({f.name})
    if isinstance(f, Not):
        return formula_vars(f.operand)
    return formula_vars(f.left) | formula_vars(f.right)


def count_connectives(f: Formula) -> int:
    if isinstance(f, BoolVar):
        return 0
    if isinstance(f, Not):
        return 1 + count_connectives(f.operand)
    return 1 + count_connectives(f.left) + count_connectives(f.right)


def count_atoms(f: Formula) -> int:
    if isinstance(f, BoolVar):
        return 1
    if isinstance(f, Not):
        return count_atoms(f.operand)
    return count_atoms(f.left) + count_atoms(f.right)


@dataclass(frozen=True)
class QBF:
    prefix: tuple[tuple[Quantifier, str], ...]
    matrix: Formula

    def __post_init__(self):
        if not self.prefix:
            raise ValueError("prefix must not be empty")
        names = [name for _, name in self.prefix]
        if len(set(names)) != len(names):
            raise ValueError("prefix names must be distinct")
        free = formula_vars(self.matrix) - set(names)
        if free:
            raise ValueError(f"matrix uses unquantified variable(s): {sorted(free)}")

    @property
    def size(self) -> int:
        """Prefix length plus matrix connectives plus matrix atoms."""
        return (
            len(self.prefix)
            + count_connectives(self.matrix)
            + count_atoms(self.matrix)
        )

    def __str__(self) -> str:
        return qbf_text(self)


# --------------------------------------------------------------------------
# printing

# precedence levels: or 0, and 1, not and atoms 2


def formula_text(f: Formula, level: int = 0) -> str:
    if isinstance(f, BoolVar):
        return f.name
    if isinstance(f, Not):
        return "!" + formula_text(f.operand, 2)
    if isinstance(f, And):
        s = f"{formula_text(f.left, 1)} & {formula_text(f.right, 2)}"
        return f"({s})" if level > 1 else s
    s = f"{formula_text(f.left, 0)} | {formula_text(f.right, 1)}"
    return f"({s})" if level > 0 else s


def qbf_text(q: QBF) -> str:
    prefix = " ".join(f"{quant.value} {name}." for quant, name in q.prefix)
    return f"{prefix} {formula_text(q.matrix)}"


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_']*|[.&|!()]")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(text, pos)
            if m is None:
                raise self._error_at(pos, f"unexpected character {text[pos]!r}")
            self.tokens.append((m.group(0), pos))
            pos = m.end()
        self.i = 0

    def _error_at(self, pos: int, message: str) -> ParseError:
        line = self.text.count("\n", 0, pos) + 1
        column = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return ParseError(message, line, column)

    def error(self, message: str) -> ParseError:
        pos = self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)
        return self._error_at(pos, message)

    def peek(self) -> str:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else ""

    def take(self) -> str:
        if self.i >= len(self.tokens):
            raise self.error("unexpected end of input")
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def expect(self, tok: str):
        got = self.peek()
        if got != tok:
            raise self.error(f"expected {tok!r}" + (f", got {got!r}" if got else ""))
        self.i += 1

    def parse(self) -> QBF:
        prefix = []
        while self.peek() in ("forall", "exists"):
            quant = Quantifier(self.take())
            name = self.take()
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name) or name in (
                "forall",
                "exists",
            ):
                raise self.error(f"bad quantified variable name {name!r}")
            self.expect(".")
            prefix.append((quant, name))
        if not prefix:
            raise self.error("expected 'forall' or 'exists'")
        matrix = self.parse_or()
        if self.i < len(self.tokens):
            raise self.error(f"trailing input {self.peek()!r}")
        try:
            return QBF(tuple(prefix), matrix)
        except ValueError as e:
            raise self.error(str(e)) from None

    def parse_or(self) -> Formula:
        out = self.parse_and()
        while self.peek() == "|":
            self.i += 1
            out = Or(out, self.parse_and())
        return out

    def parse_and(self) -> Formula:
        out = self.parse_unary()
        while self.peek() == "&":
            self.i += 1
            out = And(out, self.parse_unary())
        return out

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.i += 1
            return Not(self.parse_unary())
        if tok == "(":
            self.i += 1
            out = self.parse_or()
            self.expect(")")
            return out
        if not tok:
            raise self.error("unexpected end of input")
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok) or tok in (
            "forall",
            "exists",
        ):
            raise self.error(f"expected a variable, got {tok!r}")
        self.i += 1
        return BoolVar(tok)


def parse_qbf(text: str) -> QBF:
    return _Parser(text).parse()
