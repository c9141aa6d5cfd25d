"""Cooper-style quantifier elimination for Presburger arithmetic.

Variables are eliminated innermost-first.  Each elimination normalises the
coefficients of the eliminated variable to +-1 (adding a divisibility
constraint), then takes the disjunction over the ``-inf`` (or ``+inf``)
projection and the boundary test points, whichever side has fewer bounds.
Conjunctions carrying an equality on the variable are solved by
substitution instead.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .formula import (
    FALSE, TRUE, And, Bot, Dvd, Exists, Forall, Formula, Ge, Not, Or, Top, conj,
    disj, dvd, exists_many, free_variables, iff, neg, nnf, size, substitute,
)
from .terms import LinearTerm

DEFAULT_TERM_LIMIT = int(os.environ.get("PRESLOCI_TERM_LIMIT", "400000"))


class ResourceLimitExceeded(RuntimeError):
    """Raised when an intermediate formula exceeds the configured term bound."""


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass
class _Budget:
    limit: int

    def check(self, f: Formula) -> Formula:
        if size(f) > self.limit:
            raise ResourceLimitExceeded(
                f"intermediate formula exceeds {self.limit} nodes; raise the term limit or simplify the input")
        return f


def eliminate_quantifiers(f: Formula, term_limit: int | None = None) -> Formula:
    """Return a quantifier-free formula equivalent to ``f`` over the integers."""
    return _qe_cached(f, term_limit or DEFAULT_TERM_LIMIT)


@lru_cache(maxsize=4096)
def _qe_cached(f: Formula, limit: int) -> Formula:
    return _qe(f, _Budget(limit))


def _qe(f: Formula, budget: _Budget) -> Formula:
    if isinstance(f, Exists):
        body = _qe(f.body, budget)
        return budget.check(_eliminate_exists(f.var, body, budget))
    if isinstance(f, Forall):
        body = _qe(f.body, budget)
        return budget.check(neg(_eliminate_exists(f.var, nnf(neg(body)), budget)))
    if isinstance(f, Not):
        return neg(_qe(f.arg, budget))
    if isinstance(f, And):
        return conj(*(_qe(a, budget) for a in f.args))
    if isinstance(f, Or):
        return disj(*(_qe(a, budget) for a in f.args))
    return f


def _mentions(f: Formula, x: str) -> bool:
    return x in free_variables(f)


def _eliminate_exists(x: str, body: Formula, budget: _Budget) -> Formula:
    body = nnf(body)
    if not _mentions(body, x):
        return body
    if isinstance(body, Or):
        return disj(*(_eliminate_exists(x, a, budget) for a in body.args))
    if isinstance(body, And):
        inner = [a for a in body.args if _mentions(a, x)]
        outer = [a for a in body.args if not _mentions(a, x)]
        if outer:
            return conj(*outer, _eliminate_exists(x, conj(*inner), budget))
        solved = _solve_equality(x, body)
        if solved is not None:
            return solved
        window = _bounded_window(x, body)
        if window is not None:
            lo, width = window
            return disj(*(substitute(body, {x: lo + k}) for k in range(width + 1)))
    return budget.check(_cooper(x, body))


def _solve_equality(x: str, body: And) -> Formula | None:
    ges = {a.term: a for a in body.args if isinstance(a, Ge) and a.term.coeff(x) != 0}
    best = None
    for t in ges:
        if -t in ges:
            c = abs(t.coeff(x))
            if best is None or c < abs(best.coeff(x)):
                best = t
    if best is None:
        return None
    a = best.coeff(x)
    u = best.drop(x)
    # a*x + u = 0  <=>  x = -u/a, requires |a| divides u
    value = u * (-1) / a if a != 0 else None
    rest = [g for g in body.args if g not in (Ge(best), Ge(-best))]
    parts = [dvd(abs(a), u)] if abs(a) > 1 else []
    parts.append(substitute(conj(*rest), {x: value}))
    return conj(*parts)


def _bounded_window(x: str, body: And, max_width: int = 64) -> tuple[LinearTerm, int] | None:
    """A unit lower bound ``x >= l`` and unit upper bound ``x <= u`` with
    ``u - l`` a small constant let us enumerate ``x`` directly."""
    lows, ups = [], []
    for a in body.args:
        if isinstance(a, Ge):
            c = a.term.coeff(x)
            if c == 1:
                lows.append(-a.term.drop(x))
            elif c == -1:
                ups.append(a.term.drop(x))
    best = None
    for lo in lows:
        for up in ups:
            d = up - lo
            if d.is_constant():
                if d.const < 0:
                    return lo, -1
                if d.const <= max_width and (best is None or d.const < best[1]):
                    best = (lo, d.const)
    return best


def _literals(f: Formula) -> list[Formula]:
    out: list[Formula] = []

    def walk(g: Formula) -> None:
        if isinstance(g, (And, Or)):
            for a in g.args:
                walk(a)
        elif isinstance(g, Not):
            walk(g.arg)
        elif isinstance(g, (Ge, Dvd)):
            out.append(g)

    walk(f)
    return out


def normalize_unit(x: str, body: Formula) -> tuple[Formula, int]:
    """Rewrite ``body`` in terms of ``x' = L*x`` so that every atom has
    ``x'``-coefficient in {-1, 0, 1}; returns the rewritten body (still in
    the variable name ``x``, now meaning ``x'``) and ``L``."""
    L = 1
    for a in _literals(body):
        c = a.term.coeff(x)
        if c:
            L = _lcm(L, abs(c))
    if L == 1:
        return body, 1

    def fix(a: Formula) -> Formula:
        c = a.term.coeff(x)
        if c == 0:
            return a
        k = L // abs(c)
        t = a.term.drop(x) * k + LinearTerm.var(x, 1 if c > 0 else -1)
        if isinstance(a, Ge):
            return Ge(t)
        return Dvd(a.modulus * k, t)

    def go(g: Formula) -> Formula:
        if isinstance(g, (Ge, Dvd)):
            return fix(g)
        if isinstance(g, Not):
            return Not(go(g.arg))
        if isinstance(g, And):
            return conj(*(go(a) for a in g.args))
        if isinstance(g, Or):
            return disj(*(go(a) for a in g.args))
        return g

    return conj(go(body), Dvd(L, LinearTerm.var(x))), L


@dataclass(frozen=True)
class CooperData:
    """Boundary data for one variable of a unit-normalised NNF formula."""
    body: Formula
    scale: int
    delta: int
    lower: tuple[LinearTerm, ...]   # b with x' > b, i.e. x' >= b + 1
    upper: tuple[LinearTerm, ...]   # a with x' < a


def cooper_data(x: str, body: Formula) -> CooperData:
    body, L = normalize_unit(x, nnf(body))
    delta = 1
    lower: dict[LinearTerm, None] = {}
    upper: dict[LinearTerm, None] = {}
    for a in _literals(body):
        c = a.term.coeff(x)
        if c == 0:
            continue
        if isinstance(a, Dvd):
            delta = _lcm(delta, a.modulus)
        elif c > 0:       # x' + w >= 0  ->  x' > -w - 1
            lower.setdefault(-a.term.drop(x) - 1)
        else:             # -x' + w >= 0 ->  x' < w + 1
            upper.setdefault(a.term.drop(x) + 1)
    return CooperData(body, L, delta, tuple(lower), tuple(upper))


def _at_infinity(x: str, body: Formula, minus: bool) -> Formula:
    def go(g: Formula) -> Formula:
        if isinstance(g, Ge):
            c = g.term.coeff(x)
            if c == 0:
                return g
            return (FALSE if c > 0 else TRUE) if minus else (TRUE if c > 0 else FALSE)
        if isinstance(g, Not):
            return neg(go(g.arg))
        if isinstance(g, And):
            return conj(*(go(a) for a in g.args))
        if isinstance(g, Or):
            return disj(*(go(a) for a in g.args))
        return g

    return go(body)


def _cooper(x: str, body: Formula) -> Formula:
    d = cooper_data(x, body)
    use_lower = len(d.lower) <= len(d.upper)
    inf = _at_infinity(x, d.body, minus=use_lower)
    out: list[Formula] = []
    for j in range(1, d.delta + 1):
        shift = j if use_lower else -j
        if _mentions(inf, x):
            out.append(substitute(inf, {x: LinearTerm.constant(shift)}))
        elif j == 1:
            out.append(inf)
        for b in (d.lower if use_lower else d.upper):
            out.append(substitute(d.body, {x: b + shift}))
    return disj(*out)


# ---------------------------------------------------------------------------
# derived decision procedures


def is_valid(f: Formula, term_limit: int | None = None) -> bool:
    """Truth of the universal closure of ``f``."""
    from .formula import forall_many
    g = eliminate_quantifiers(forall_many(free_variables(f), f), term_limit)
    if not isinstance(g, (Top, Bot)):
        raise AssertionError(f"closed formula did not reduce to a constant: {g}")
    return isinstance(g, Top)


def is_satisfiable(f: Formula, term_limit: int | None = None) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    g = eliminate_quantifiers(exists_many(free_variables(f), f), term_limit)
    if not isinstance(g, (Top, Bot)):
        raise AssertionError(f"closed formula did not reduce to a constant: {g}")
    return isinstance(g, Top)


def equivalent(f: Formula, g: Formula, term_limit: int | None = None) -> bool:
    return is_valid(iff(f, g), term_limit)


def simplify(f: Formula) -> Formula:
    """Quantifier elimination followed by pruning of unsatisfiable disjuncts."""
    g = eliminate_quantifiers(f)
    if isinstance(g, Or):
        kept = [a for a in g.args if is_satisfiable(a)]
        return disj(*kept)
    if not isinstance(g, (Top, Bot)) and not is_satisfiable(g):
        return FALSE
    return g


def _expand_negated_dvd(f: Formula, max_modulus: int) -> Formula:
    """Replace ``not (n | t)`` by the disjunction of the nonzero residues."""
    if isinstance(f, Not) and isinstance(f.arg, Dvd) and f.arg.modulus <= max_modulus:
        a = f.arg
        return disj(*(dvd(a.modulus, a.term - r) for r in range(1, a.modulus)))
    if isinstance(f, And):
        return conj(*(_expand_negated_dvd(a, max_modulus) for a in f.args))
    if isinstance(f, Or):
        return disj(*(_expand_negated_dvd(a, max_modulus) for a in f.args))
    return f


def _cubes(f: Formula, cap: int) -> list[list[Formula]] | None:
    if isinstance(f, Or):
        out: list[list[Formula]] = []
        for a in f.args:
            sub = _cubes(a, cap)
            if sub is None:
                return None
            out.extend(sub)
            if len(out) > cap:
                return None
        return out
    if isinstance(f, And):
        acc: list[list[Formula]] = [[]]
        for a in f.args:
            sub = _cubes(a, cap)
            if sub is None or len(acc) * len(sub) > cap:
                return None
            acc = [c + s for c in acc for s in sub]
        return acc
    if isinstance(f, Bot):
        return []
    if isinstance(f, Top):
        return [[]]
    return [[f]]


def _literal_key(a: Formula):
    t = a.arg.term if isinstance(a, Not) else a.term
    coeffs = tuple(sorted((v, abs(c)) for v, c in t.coeffs))
    return (isinstance(a, Ge) is False, coeffs, -(t.coeffs[0][1] if t.coeffs else 0), str(a))


def tidy(f: Formula, cap: int = 64) -> Formula:
    """Semantic cleanup of a quantifier-free formula: DNF with unsatisfiable
    cubes dropped, implied literals removed and subsumed cubes merged.
    Falls back to ``f`` when the DNF exceeds ``cap`` cubes."""
    if isinstance(f, (Top, Bot)):
        return f
    g = _expand_negated_dvd(nnf(f), 6)
    cubes = _cubes(g, cap)
    if cubes is None:
        return f
    kept: list[Formula] = []
    for lits in cubes:
        c = conj(*lits)
        if not is_satisfiable(c):
            continue
        lits = list(c.args) if isinstance(c, And) else [c]
        i = 0
        while i < len(lits) and len(lits) > 1:
            rest = conj(*(lits[:i] + lits[i + 1:]))
            if not is_satisfiable(conj(rest, neg(lits[i]))):
                lits.pop(i)
            else:
                i += 1
        kept.append(conj(*sorted(lits, key=_literal_key)))
    implied = lambda a, b: not is_satisfiable(conj(a, neg(b)))
    out: list[Formula] = []
    for c in kept:
        if any(implied(c, d) for d in out):
            continue
        out = [d for d in out if not implied(d, c)] + [c]
    res = disj(*out)
    return res if len(str(res)) <= len(str(f)) or size(res) <= size(f) else f
