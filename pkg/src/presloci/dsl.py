"""Text format for constructible functions (``.pcf`` files).

    func f(s; y) {
      term coeff = 1/(1 - L^-1), exp = s*y - |s|, factors = [y, s - 1], when y >= 0;
      term coeff = -2, when y = 0;
      domain y >= 0;
    }

The header lists parameters before ``;`` and lattice variables after it;
``func f on S x Z^m { ... }`` is accepted as well, with lattice variables
``y`` (m = 1) or ``y1..ym`` and the parameters collected from the body.
Exponents and factors are polynomials over the variables and may use
``abs``/``|.|``, ``max`` and ``min`` of affine expressions, which are
expanded into guarded terms.  ``coeff`` is a rational expression in ``L``.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .constructible import ConstructibleFunction, Term
from .poly import Poly
from .presburger.formula import TRUE, Bot, Formula, conj, free_variables, ge
from .presburger.parser import PresburgerSyntaxError, parse_formula
from .ring import FORMAL, ElementSyntaxError, Mode, parse_element


class DslSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


def _loc(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _split_top(text: str, start: int, sep: str) -> list[tuple[int, str]]:
    """Split at ``sep`` outside brackets; returns ``(offset, chunk)``."""
    out = []
    depth = 0
    begin = 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((start + begin, text[begin:i]))
            begin = i + 1
    out.append((start + begin, text[begin:]))
    return [(o + len(c) - len(c.lstrip()), c.strip()) for o, c in out if c.strip()]


# ---------------------------------------------------------------------------
# guarded polynomial expressions

_EXPR_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9']*)|(\*\*|[-+*/^(),|]))")

Guarded = list[tuple[Formula, Poly]]


def _combine(a: Guarded, b: Guarded, op) -> Guarded:
    out = []
    for g, p in a:
        for h, r in b:
            gh = conj(g, h)
            if not isinstance(gh, Bot):
                out.append((gh, op(p, r)))
    return out


def _affine(p: Poly, what: str, col: int):
    if not p.is_affine():
        raise DslSyntaxError(f"{what} needs an affine argument, got {p}", 1, col)
    return p.to_linear()


def parse_guarded(text: str) -> Guarded:
    """Parse a polynomial expression with piecewise-affine operators into
    guarded polynomial pieces."""
    toks = []
    pos = 0
    s = text.rstrip()
    while pos < len(s):
        m = _EXPR_TOKEN.match(s, pos)
        if not m:
            raise DslSyntaxError(f"unexpected character {s[pos]!r}", 1, pos + 1)
        kind = ("int", "ident", "op")[m.lastindex - 1]
        toks.append((kind, m.group(m.lastindex), m.start(m.lastindex) + 1))
        pos = m.end()
    toks.append(("end", "", len(s) + 1))
    i = 0

    def peek():
        return toks[i]

    def take(expected=None):
        nonlocal i
        t = toks[i]
        if expected is not None and t[1] != expected:
            raise DslSyntaxError(f"expected {expected!r}, found {t[1] or 'end of input'!r}", 1, t[2])
        i += 1
        return t

    def expr(in_bars=False) -> Guarded:
        acc = term()
        while peek()[1] in ("+", "-"):
            op = take()[1]
            rhs = term()
            acc = _combine(acc, rhs, (lambda a, b: a + b) if op == "+" else (lambda a, b: a - b))
        return acc

    def term() -> Guarded:
        acc = factor()
        while peek()[1] in ("*", "/"):
            op = take()
            rhs = factor()
            if op[1] == "/":
                if len(rhs) != 1 or not rhs[0][1].is_constant() or rhs[0][1].constant_term() == 0:
                    raise DslSyntaxError("division only by a nonzero constant", 1, op[2])
                c = Fraction(rhs[0][1].constant_term())
                acc = [(g, p * (1 / c)) for g, p in acc]
            else:
                acc = _combine(acc, rhs, lambda a, b: a * b)
        return acc

    def factor() -> Guarded:
        if peek()[1] == "-":
            take()
            return [(g, -p) for g, p in factor()]
        base = atom()
        if peek()[1] in ("^", "**"):
            take()
            if peek()[1] == "-":
                raise DslSyntaxError("negative powers are not polynomial", 1, peek()[2])
            t = take()
            if t[0] != "int":
                raise DslSyntaxError("exponent must be a natural number", 1, t[2])
            k = int(t[1])
            base = [(g, p ** k) for g, p in base]
        return base

    def atom() -> Guarded:
        kind, txt, col = peek()
        if kind == "int":
            take()
            return [(TRUE, Poly.const(int(txt)))]
        if kind == "ident" and txt in ("abs", "max", "min") and toks[i + 1][1] == "(":
            take()
            take("(")
            a = expr()
            if txt == "abs":
                take(")")
                return _abs(a, col)
            take(",")
            b = expr()
            take(")")
            return _extreme(a, b, txt == "max", col)
        if kind == "ident":
            take()
            return [(TRUE, Poly.var(txt))]
        if txt == "(":
            take()
            e = expr()
            take(")")
            return e
        if txt == "|":
            take()
            e = expr()
            take("|")
            return _abs(e, col)
        raise DslSyntaxError(f"unexpected {txt or 'end of input'!r}", 1, col)

    out = expr()
    if peek()[0] != "end":
        raise DslSyntaxError(f"unexpected {peek()[1]!r}", 1, peek()[2])
    return out


def _abs(a: Guarded, col: int) -> Guarded:
    out = []
    for g, p in a:
        t = _affine(p, "abs", col)
        for h, r in ((conj(g, ge(t)), p), (conj(g, ge(-t - 1)), -p)):
            if not isinstance(h, Bot):
                out.append((h, r))
    return out


def _extreme(a: Guarded, b: Guarded, largest: bool, col: int) -> Guarded:
    out = []
    for g, p in a:
        for h, r in b:
            d = _affine(p - r if largest else r - p, "max/min", col)
            for k, v in ((conj(g, h, ge(d)), p), (conj(g, h, ge(-d - 1)), r)):
                if not isinstance(k, Bot):
                    out.append((k, v))
    return out


# ---------------------------------------------------------------------------
# functions

_HEAD = re.compile(r"\s*func\s+([A-Za-z_][A-Za-z_0-9]*)\s*"
                   r"(?:\(\s*([^;)]*)\s*;\s*([^)]*)\)|on\s+S\s*x\s*Z\^(\d+))\s*\{")


def _names(txt: str) -> tuple[str, ...]:
    return tuple(n.strip() for n in txt.split(",") if n.strip())


def parse_pcf(text: str, mode: Mode = FORMAL) -> ConstructibleFunction:
    m = _HEAD.match(text)
    if not m:
        raise DslSyntaxError("expected 'func NAME(params; lattice) {'", *_loc(text, 0))
    close = text.rfind("}")
    if close < m.end():
        raise DslSyntaxError("missing closing '}'", *_loc(text, len(text)))
    if text[close + 1:].strip():
        raise DslSyntaxError("text after closing '}'", *_loc(text, close + 1))
    if m.group(4) is not None:
        k = int(m.group(4))
        lattice = ("y",) if k == 1 else tuple(f"y{i}" for i in range(1, k + 1))
        params = None
    else:
        params, lattice = _names(m.group(2)), _names(m.group(3))
    body_start = m.end()
    body = text[body_start:close]
    terms: list[Term] = []
    domain: Formula = TRUE
    declared: tuple[str, ...] | None = None
    for off, stmt in _split_top(body, body_start, ";"):
        kw = stmt.split(None, 1)[0]
        rest = stmt[len(kw):].strip()
        rest_off = off + stmt.find(rest) if rest else off + len(stmt)
        if kw == "term":
            terms.extend(_parse_term(text, rest, rest_off, mode))
        elif kw == "domain":
            domain = _formula(text, rest, rest_off)
        elif kw == "params":
            declared = _names(rest)
        else:
            raise DslSyntaxError(f"unknown statement {kw!r}", *_loc(text, off))
    if params is None:
        params = declared
    if params is None:
        used = set(free_variables(domain))
        for t in terms:
            used |= set(free_variables(t.support)) | set(t.exponent.variables) | set(t.factor.variables)
        params = tuple(sorted(used - set(lattice)))
    known = set(params) | set(lattice)
    for t in terms:
        extra = (set(free_variables(t.support)) | set(t.exponent.variables) | set(t.factor.variables)) - known
        if extra:
            raise DslSyntaxError(f"undeclared variable(s) {', '.join(sorted(extra))}", *_loc(text, body_start))
    return ConstructibleFunction(tuple(params), tuple(lattice), tuple(terms), domain, mode)


def _formula(text: str, src: str, off: int) -> Formula:
    try:
        return parse_formula(src)
    except PresburgerSyntaxError as e:
        line, col = _loc(text, off)
        raise DslSyntaxError(e.message, line + e.line - 1, (col + e.col - 1) if e.line == 1 else e.col) from None


def _guarded(text: str, src: str, off: int) -> Guarded:
    try:
        return parse_guarded(src)
    except DslSyntaxError as e:
        line, col = _loc(text, off + e.col - 1)
        raise DslSyntaxError(e.message, line, col) from None


def _parse_term(text: str, src: str, off: int, mode: Mode) -> list[Term]:
    coeff = mode.one()
    exp: Guarded = [(TRUE, Poly())]
    factors: list[Guarded] = []
    poles: list[Poly] = []
    support: Formula = TRUE
    for coff, clause in _split_top(src, off, ","):
        if clause.startswith("when "):
            support = conj(support, _formula(text, clause[5:], coff + 5))
            continue
        key, eqs, val = clause.partition("=")
        key = key.strip()
        if not eqs:
            raise DslSyntaxError(f"expected 'key = value' in {clause!r}", *_loc(text, coff))
        voff = coff + len(key) + 1 + (len(val) - len(val.lstrip()))
        val = val.strip()
        if key == "coeff":
            try:
                c = parse_element(val)
            except (ElementSyntaxError, ValueError) as e:
                raise DslSyntaxError(f"bad coefficient: {e}", *_loc(text, voff)) from None
            coeff = mode.coerce(c)
        elif key == "exp":
            exp = _guarded(text, val, voff)
        elif key in ("factors", "poles"):
            if not (val.startswith("[") and val.endswith("]")):
                raise DslSyntaxError(f"{key} must be a bracketed list", *_loc(text, voff))
            items = [_guarded(text, v, o) for o, v in _split_top(val[1:-1], voff + 1, ",")]
            if key == "factors":
                factors.extend(items)
            else:
                for it in items:
                    if len(it) != 1:
                        raise DslSyntaxError("pole exponents must be polynomials", *_loc(text, voff))
                    poles.append(it[0][1])
        elif key == "factor":
            factors.append(_guarded(text, val, voff))
        elif key == "support":
            support = conj(support, _formula(text, val, voff))
        else:
            raise DslSyntaxError(f"unknown term field {key!r}", *_loc(text, coff))
    pieces: Guarded = [(g, Poly.const(1)) for g, _ in [(TRUE, None)]]
    for fac in factors:
        pieces = _combine(pieces, fac, lambda a, b: a * b)
    out = []
    for g, e in exp:
        for h, p in pieces:
            sup = conj(support, g, h)
            if not isinstance(sup, Bot):
                out.append(Term(coeff, sup, e, p, tuple(sorted(poles, key=str))))
    return out


def format_pcf(f: ConstructibleFunction, name: str = "f") -> str:
    """Inverse of :func:`parse_pcf` (up to term normalization)."""
    from .constructible import format_function
    return format_function(f).replace("func f(", f"func {name}(", 1)
