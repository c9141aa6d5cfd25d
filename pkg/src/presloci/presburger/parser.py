"""Recursive-descent parser for the Presburger formula DSL.

    formula  := quant* impl
    quant    := ("exists" | "forall") ident "."
    impl     := or ("->" impl)?
    or       := and ("or" and)*
    and      := unary ("and" unary)*
    unary    := "not" unary | "(" formula ")" | "true" | "false" | quant+ impl | atom
    atom     := linterm ("=" | "!=" | "<=" | ">=" | "<" | ">") linterm
              | linterm "mod" NAT "=" NAT
    linterm  := ["-"] mono (("+" | "-") mono)*
    mono     := INT | ident | INT "*" ident
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .formula import (
    FALSE, TRUE, Formula, conj, disj, dvd, eq, exists, forall, free_variables, ge,
    implies, neg,
)
from .terms import LinearTerm


class PresburgerSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9']*)
  | (?P<op>->|<=|>=|!=|==|[=<>+\-*.()\[\],;:{}^/|])
""", re.VERBOSE)

KEYWORDS = {"exists", "forall", "and", "or", "not", "mod", "true", "false"}


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise PresburgerSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        elif kind != "ws":
            if kind == "ident" and s in KEYWORDS:
                kind = s
            out.append(Token(kind, s, line, col))
            col += len(s)
        else:
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *kinds_or_texts: str) -> bool:
        t = self.cur
        return t.kind in kinds_or_texts or (t.kind == "op" and t.text in kinds_or_texts)

    def take(self) -> Token:
        t = self.cur
        self.i += 1
        return t

    def expect(self, what: str) -> Token:
        if not self.at(what):
            self.error(f"expected {what!r}")
        return self.take()

    def error(self, message: str) -> None:
        t = self.cur
        where = "end of input" if t.kind == "eof" else repr(t.text)
        raise PresburgerSyntaxError(f"{message} at {where}", t.line, t.col)


class FormulaParser:
    def __init__(self, ts: TokenStream):
        self.ts = ts

    def formula(self) -> Formula:
        return self.impl()

    def quantified(self) -> Formula:
        kind = self.ts.take().kind
        var = self.ts.expect("ident").text
        self.ts.expect(".")
        body = self.impl()
        return exists(var, body) if kind == "exists" else forall(var, body)

    def impl(self) -> Formula:
        if self.ts.at("exists", "forall"):
            return self.quantified()
        left = self.orexpr()
        if self.ts.at("->"):
            self.ts.take()
            return implies(left, self.impl())
        return left

    def orexpr(self) -> Formula:
        items = [self.andexpr()]
        while self.ts.at("or"):
            self.ts.take()
            items.append(self.andexpr())
        return disj(*items)

    def andexpr(self) -> Formula:
        items = [self.unary()]
        while self.ts.at("and"):
            self.ts.take()
            items.append(self.unary())
        return conj(*items)

    def unary(self) -> Formula:
        ts = self.ts
        if ts.at("not"):
            ts.take()
            return neg(self.unary())
        if ts.at("true"):
            ts.take()
            return TRUE
        if ts.at("false"):
            ts.take()
            return FALSE
        if ts.at("exists", "forall"):
            return self.quantified()
        if ts.at("("):
            # parenthesised formula or parenthesised linear term starting an atom
            save = ts.i
            ts.take()
            try:
                f = self.formula()
                ts.expect(")")
                if not ts.at("=", "!=", "<=", ">=", "<", ">", "mod", "+", "-"):
                    return f
            except PresburgerSyntaxError:
                pass
            ts.i = save
        return self.atom()

    def atom(self) -> Formula:
        ts = self.ts
        lhs = self.linterm()
        if ts.at("mod"):
            ts.take()
            n = int(ts.expect("int").text)
            if n < 2:
                t = ts.toks[ts.i - 1]
                raise PresburgerSyntaxError(f"modulus must be at least 2, got {n}", t.line, t.col)
            ts.expect("=")
            r = int(ts.expect("int").text)
            return dvd(n, lhs - r)
        if not ts.at("=", "==", "!=", "<=", ">=", "<", ">"):
            ts.error("expected comparison")
        op = ts.take().text
        rhs = self.linterm()
        d = lhs - rhs
        if op in ("=", "=="):
            return eq(d)
        if op == "!=":
            return neg(eq(d))
        if op == ">=":
            return ge(d)
        if op == "<=":
            return ge(-d)
        if op == ">":
            return ge(d - 1)
        return ge(-d - 1)

    def linterm(self) -> LinearTerm:
        ts = self.ts
        sign = 1
        if ts.at("-"):
            ts.take()
            sign = -1
        elif ts.at("+"):
            ts.take()
        acc = self.mono() * sign
        while ts.at("+", "-"):
            s = 1 if ts.take().text == "+" else -1
            acc = acc + self.mono() * s
        return acc

    def mono(self) -> LinearTerm:
        ts = self.ts
        if ts.at("int"):
            n = int(ts.take().text)
            if ts.at("*"):
                ts.take()
                v = ts.expect("ident").text
                return LinearTerm.var(v, n)
            return LinearTerm.constant(n)
        if ts.at("ident"):
            return LinearTerm.var(ts.take().text)
        if ts.at("("):
            ts.take()
            t = self.linterm()
            ts.expect(")")
            return t
        ts.error("expected integer or variable")
        raise AssertionError


def parse_formula(text: str, variables: Sequence[str] | None = None) -> Formula:
    """Parse DSL text into a :class:`Formula`.

    With ``variables`` given, any free variable outside that list is an
    error (unbound variable).
    """
    ts = TokenStream(tokenize(text))
    f = FormulaParser(ts).formula()
    if not ts.at("eof"):
        ts.error("unexpected trailing input")
    if variables is not None:
        check_bound(f, variables, text)
    return f


def check_bound(f: Formula, variables: Iterable[str], text: str = "") -> None:
    allowed = set(variables)
    for v in free_variables(f):
        if v not in allowed:
            line, col = _locate(text, v)
            raise PresburgerSyntaxError(f"unbound variable {v!r}", line, col)


def _locate(text: str, name: str) -> tuple[int, int]:
    m = re.search(rf"\b{re.escape(name)}\b", text)
    if not m:
        return 1, 1
    before = text[: m.start()]
    return before.count("\n") + 1, m.start() - (before.rfind("\n") + 1) + 1
