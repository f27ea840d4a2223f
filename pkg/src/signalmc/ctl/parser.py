"""Recursive-descent parser for CTL formulas and SPEC files.

Grammar (loosest binding first)::

    formula := impl
    impl    := disj ("->" impl)?
    disj    := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "!" unary | ("AX"|"EX"|"AF"|"EF"|"AG"|"EG") unary
             | ("A"|"E") "[" formula "U" formula "]"
             | "(" formula ")" | "true" | "false" | atom
    atom    := ident ("." ident)* (cmp value)?

A comparison atom is folded into one canonical name with whitespace removed,
so ``light0.wait <= 54`` becomes ``Atom("light0.wait<=54")``.  The Unicode
typeset forms (``→ ≤ ≥ ≠ ¬ ∧ ∨``) are accepted as aliases.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..errors import CTLSyntaxError
from .formula import (AF, AG, AU, AX, EF, EG, EU, EX, FALSE, TRUE, And, Atom,
                      Formula, Implies, Not, Or, to_text)

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op>->|→|!=|≠|<=|≤|>=|≥|[!¬&∧|∨()\[\]<>=.])
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)

_ALIASES = {"→": "->", "≠": "!=", "≤": "<=", "≥": ">=", "¬": "!", "∧": "&", "∨": "|"}
_TEMPORAL = {"AX": AX, "EX": EX, "AF": AF, "EF": EF, "AG": AG, "EG": EG}
_CMP = {"=", "!=", "<=", "<", ">=", ">"}
_RESERVED = set(_TEMPORAL) | {"U", "true", "false", "TRUE", "FALSE"}
_UNARY_START = ("!", "AX", "EX", "AF", "EF", "AG", "EG", "A", "E", "(", "true",
                "false", "identifier")


@dataclass(frozen=True)
class _Tok:
    kind: str   # "op", "int", "ident", "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str, line: int, col0: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise CTLSyntaxError(f"unexpected character {text[pos]!r}", line, col0 + pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            value = _ALIASES.get(m.group(), m.group())
            toks.append(_Tok(kind, value, line, col0 + pos + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, col0 + len(text) + 1))
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def fail(self, expected, message: Optional[str] = None):
        t = self.tok
        shown = "end of input" if t.kind == "eof" else repr(t.text)
        raise CTLSyntaxError(message or f"unexpected {shown}", t.line, t.col, expected)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.fail([text])
        t = self.tok
        self.i += 1
        return t

    def formula(self) -> Formula:
        left = self.disj()
        if self.at("->"):
            self.i += 1
            return Implies(left, self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.at("|"):
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        t = self.tok
        if self.at("!"):
            self.i += 1
            return Not(self.unary())
        if self.at("("):
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "ident":
            if t.text in _TEMPORAL:
                self.i += 1
                return _TEMPORAL[t.text](self.unary())
            if t.text in ("A", "E") and self.peek().text == "[":
                self.i += 2
                left = self.formula()
                self.expect("U")
                right = self.formula()
                self.expect("]")
                return AU(left, right) if t.text == "A" else EU(left, right)
            if t.text in ("true", "TRUE"):
                self.i += 1
                return TRUE
            if t.text in ("false", "FALSE"):
                self.i += 1
                return FALSE
            if t.text not in _RESERVED:
                return self.atom()
        self.fail(_UNARY_START)

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in _RESERVED:
            self.fail(["identifier"])
        self.i += 1
        return t.text

    def atom(self) -> Atom:
        path = [self.ident()]
        while self.at("."):
            self.i += 1
            path.append(self.ident())
        name = ".".join(path)
        if self.tok.kind == "op" and self.tok.text in _CMP:
            op = self.tok.text
            self.i += 1
            t = self.tok
            if t.kind == "int" or (t.kind == "ident" and t.text not in _RESERVED):
                self.i += 1
                name += op + t.text
            else:
                self.fail(["identifier", "integer"])
        return Atom(name)


def parse_formula(text: str, *, line: int = 1, column: int = 0) -> Formula:
    """Parse one CTL formula; ``line``/``column`` offset error positions."""
    p = _Parser(_tokenize(text, line, column))
    f = p.formula()
    if p.tok.kind != "eof":
        p.fail(["->", "|", "&", "end of input"])
    return f


@dataclass(frozen=True)
class SpecEntry:
    """One SPEC line.  Probes are informational and never decide pass/fail."""

    name: Optional[str]
    source_text: str
    formula: Formula
    probe: bool = False

    @classmethod
    def from_formula(cls, name: Optional[str], formula: Formula, probe: bool = False) -> SpecEntry:
        return cls(name, to_text(formula), formula, probe)

    @property
    def label(self) -> str:
        return self.name or self.source_text


_SPEC_LINE = re.compile(r"(\s*)(CTL)?SPEC\b(\s*(?:([A-Za-z_][\w.]*)\s*:)?)?")


def parse_spec_file(text: str) -> list[SpecEntry]:
    """Parse ``SPEC [name:] formula`` lines; ``--`` starts a comment."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("--", 1)[0]
        if not body.strip():
            continue
        m = _SPEC_LINE.match(body)
        if m is None:
            first = len(body) - len(body.lstrip()) + 1
            raise CTLSyntaxError("expected SPEC", lineno, first, ["SPEC"])
        name = m.group(4)
        start = m.end()
        source = body[start:].strip()
        if not source:
            raise CTLSyntaxError("missing formula", lineno, len(body) + 1, ["formula"])
        formula = parse_formula(body[start:], line=lineno, column=start)
        entries.append(SpecEntry(name, source, formula))
    return entries
