"""Presburger formula IR.

Atoms are ``t >= 0`` and ``n | t`` (printed ``t mod n = r``).  Every node is
an immutable, hashable dataclass; the smart constructors :func:`conj`,
:func:`disj`, :func:`neg`, :func:`ge`, :func:`dvd` keep formulas in a light
normal form (flattened, constants folded, atoms gcd-reduced), which is what
the printer/parser round trip is defined on.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence, Union

from .terms import LinearTerm, Number, format_linear


class Formula:
    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return conj(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return disj(self, other)

    def __invert__(self) -> "Formula":
        return neg(self)

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


TRUE = Top()
FALSE = Bot()


@dataclass(frozen=True)
class Ge(Formula):
    term: LinearTerm


@dataclass(frozen=True)
class Dvd(Formula):
    modulus: int
    term: LinearTerm


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


Atom = Union[Ge, Dvd]


# ---------------------------------------------------------------------------
# smart constructors


def ge(t: LinearTerm) -> Formula:
    """``t >= 0``, tightened by the gcd of the coefficients."""
    if t.denominator() != 1:
        t = t * t.denominator()
    if t.is_constant():
        return TRUE if t.const >= 0 else FALSE
    g = t.content()
    if g > 1:
        t = LinearTerm(tuple((v, c // g) for v, c in t.coeffs), t.const // g)
    return Ge(t)


def dvd(n: int, t: LinearTerm) -> Formula:
    """``n | t``; requires ``n >= 1``."""
    if n < 1:
        raise ValueError(f"modulus must be positive, got {n}")
    if t.denominator() != 1:
        d = t.denominator()
        return dvd(n * d, t * d)
    t = LinearTerm.make([(v, c % n) for v, c in t.coeffs], t.const % n)
    g = n
    for _, c in t.coeffs:
        g = gcd(g, c)
    g = gcd(g, t.const)
    if g > 1:
        n //= g
        t = LinearTerm(tuple((v, c // g) for v, c in t.coeffs), t.const // g)
    if n == 1:
        return TRUE
    if t.is_constant():
        return TRUE if t.const % n == 0 else FALSE
    # scale by a unit mod n so the leading coefficient becomes gcd(c, n)
    c = t.coeffs[0][1]
    g = gcd(c, n)
    if c != g:
        for u in range(1, n):
            if gcd(u, n) == 1 and (u * c) % n == g:
                t = LinearTerm.make([(v, (u * a) % n) for v, a in t.coeffs], (u * t.const) % n)
                break
    return Dvd(n, t)


def eq(t: LinearTerm) -> Formula:
    return conj(ge(t), ge(-t))


def le(a: LinearTerm, b: LinearTerm | Number) -> Formula:
    return ge(LinearTerm.constant(0) + b - a)


def lt(a: LinearTerm, b: LinearTerm | Number) -> Formula:
    return ge(LinearTerm.constant(0) + b - a - 1)


def neg(f: Formula) -> Formula:
    if f is TRUE or isinstance(f, Top):
        return FALSE
    if isinstance(f, Bot):
        return TRUE
    if isinstance(f, Not):
        return f.arg
    if isinstance(f, Ge):
        return ge(-f.term - 1)
    return Not(f)


def _flatten(kind: type, fs: Iterable[Formula]) -> list[Formula]:
    out: list[Formula] = []
    seen: set[Formula] = set()
    for f in fs:
        items = f.args if isinstance(f, kind) else (f,)
        for g in items:
            if g not in seen:
                seen.add(g)
                out.append(g)
    return out


def conj(*fs: Formula) -> Formula:
    items = _flatten(And, fs)
    if any(isinstance(f, Bot) for f in items):
        return FALSE
    items = [f for f in items if not isinstance(f, Top)]
    if _has_complement(items):
        return FALSE
    items = _merge_bounds(items, tightest=True)
    if items is None:
        return FALSE
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(tuple(items))


def disj(*fs: Formula) -> Formula:
    items = _flatten(Or, fs)
    if any(isinstance(f, Top) for f in items):
        return TRUE
    items = [f for f in items if not isinstance(f, Bot)]
    if _has_complement(items):
        return TRUE
    items = _merge_bounds(items, tightest=False)
    if items is None:
        return TRUE
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(tuple(items))


def _merge_bounds(items: list[Formula], tightest: bool) -> list[Formula] | None:
    """Keep one bound per linear form; ``None`` signals the absorbing constant.

    In a conjunction the tightest bound wins and opposite bounds with empty
    intersection (or incompatible congruences) give FALSE; in a disjunction
    the loosest bound wins and opposite bounds covering Z give TRUE.
    """
    best: dict[tuple, Formula] = {}
    congr: dict[tuple, Dvd] = {}
    for f in items:
        if isinstance(f, Ge):
            key = f.term.coeffs
            cur = best.get(key)
            if cur is None or (f.term.const < cur.term.const) == tightest:
                best[key] = f
        elif tightest and isinstance(f, Dvd):
            key = (f.modulus, f.term.coeffs)
            cur = congr.get(key)
            if cur is not None and (cur.term.const - f.term.const) % f.modulus:
                return None
            congr[key] = f
    if not best:
        return items
    for key, f in best.items():
        opp = best.get(tuple((v, -c) for v, c in key))
        if opp is not None:
            total = f.term.const + opp.term.const
            if tightest and total < 0:
                return None
            if not tightest and total >= -1:
                return None
    out: list[Formula] = []
    for f in items:
        if isinstance(f, Ge):
            keep = best.get(f.term.coeffs)
            if keep is f:
                out.append(f)
        else:
            out.append(f)
    return out


def _has_complement(items: Sequence[Formula]) -> bool:
    s = set(items)
    for f in items:
        if isinstance(f, Not) and f.arg in s:
            return True
        if isinstance(f, Ge) and len(s) > 1:
            c = Ge(-f.term - 1)
            if c in s:
                return True
    return False


def implies(a: Formula, b: Formula) -> Formula:
    return disj(neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(implies(a, b), implies(b, a))


def exists(var: str, body: Formula) -> Formula:
    if var not in free_variables(body):
        return body
    return Exists(var, body)


def forall(var: str, body: Formula) -> Formula:
    if var not in free_variables(body):
        return body
    return Forall(var, body)


def exists_many(vars: Sequence[str], body: Formula) -> Formula:
    for v in reversed(vars):
        body = exists(v, body)
    return body


def forall_many(vars: Sequence[str], body: Formula) -> Formula:
    for v in reversed(vars):
        body = forall(v, body)
    return body


# ---------------------------------------------------------------------------
# traversal


def free_variables(f: Formula) -> tuple[str, ...]:
    """Free variables in order of first occurrence."""
    out: dict[str, None] = {}

    def walk(g: Formula, bound: frozenset[str]) -> None:
        if isinstance(g, (Ge, Dvd)):
            for v in g.term.variables:
                if v not in bound:
                    out.setdefault(v)
        elif isinstance(g, Not):
            walk(g.arg, bound)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                walk(a, bound)
        elif isinstance(g, (Exists, Forall)):
            walk(g.body, bound | {g.var})

    walk(f, frozenset())
    return tuple(out)


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Exists, Forall)):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(a) for a in f.args)
    return True


def atoms(f: Formula) -> list[Atom]:
    out: dict[Formula, None] = {}

    def walk(g: Formula) -> None:
        if isinstance(g, (Ge, Dvd)):
            out.setdefault(g)
        elif isinstance(g, Not):
            walk(g.arg)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                walk(a)
        elif isinstance(g, (Exists, Forall)):
            walk(g.body)

    walk(f)
    return list(out)  # type: ignore[arg-type]


def size(f: Formula) -> int:
    if isinstance(f, Not):
        return 1 + size(f.arg)
    if isinstance(f, (And, Or)):
        return 1 + sum(size(a) for a in f.args)
    if isinstance(f, (Exists, Forall)):
        return 1 + size(f.body)
    return 1


def map_atoms(f: Formula, fn) -> Formula:
    """Rebuild ``f`` (quantifier-free) with every atom replaced by ``fn(atom)``."""
    if isinstance(f, (Ge, Dvd)):
        return fn(f)
    if isinstance(f, Not):
        return neg(map_atoms(f.arg, fn))
    if isinstance(f, And):
        return conj(*(map_atoms(a, fn) for a in f.args))
    if isinstance(f, Or):
        return disj(*(map_atoms(a, fn) for a in f.args))
    if isinstance(f, Exists):
        return exists(f.var, map_atoms(f.body, fn))
    if isinstance(f, Forall):
        return forall(f.var, map_atoms(f.body, fn))
    return f


def _subst_atom(a: Atom, mapping: Mapping[str, LinearTerm]) -> Formula:
    t = a.term.substitute(mapping)
    d = t.denominator()
    if isinstance(a, Ge):
        return ge(t * d)
    # n | t/d where t*d is integral and, by caller contract, t itself integral
    return dvd(a.modulus * d, t * d)


def substitute(f: Formula, mapping: Mapping[str, LinearTerm | Number]) -> Formula:
    """Replace free variables by affine terms.

    Rational substitutions are allowed; divisibility atoms are then scaled,
    which is only sound where the substituted values are integers.
    """
    m = {v: (t if isinstance(t, LinearTerm) else LinearTerm.constant(t)) for v, t in mapping.items()}
    if not m:
        return f

    def go(g: Formula, m: Mapping[str, LinearTerm]) -> Formula:
        if isinstance(g, (Ge, Dvd)):
            if any(v in m for v in g.term.variables):
                return _subst_atom(g, m)
            return g
        if isinstance(g, Not):
            return neg(go(g.arg, m))
        if isinstance(g, And):
            return conj(*(go(a, m) for a in g.args))
        if isinstance(g, Or):
            return disj(*(go(a, m) for a in g.args))
        if isinstance(g, (Exists, Forall)):
            inner = {k: v for k, v in m.items() if k != g.var}
            var = g.var
            body = g.body
            if any(var in t.variables for t in inner.values()):
                fresh = _fresh(var, set().union(*(t.variables for t in inner.values()), free_variables(body)))
                body = rename(body, {var: fresh})
                var = fresh
            body = go(body, inner)
            return exists(var, body) if isinstance(g, Exists) else forall(var, body)
        return g

    return go(f, m)


def rename(f: Formula, mapping: Mapping[str, str]) -> Formula:
    return substitute(f, {a: LinearTerm.var(b) for a, b in mapping.items()})


def _fresh(base: str, taken: set[str]) -> str:
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def fresh_name(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    return base if base not in taken else _fresh(base, taken)


def nnf(f: Formula) -> Formula:
    """Negation normal form of a quantifier-free formula.

    Negations survive only directly on divisibility atoms.
    """

    def pos(g: Formula) -> Formula:
        if isinstance(g, Not):
            return negf(g.arg)
        if isinstance(g, And):
            return conj(*(pos(a) for a in g.args))
        if isinstance(g, Or):
            return disj(*(pos(a) for a in g.args))
        if isinstance(g, (Exists, Forall)):
            raise ValueError("nnf expects a quantifier-free formula")
        return g

    def negf(g: Formula) -> Formula:
        if isinstance(g, Not):
            return pos(g.arg)
        if isinstance(g, And):
            return disj(*(negf(a) for a in g.args))
        if isinstance(g, Or):
            return conj(*(negf(a) for a in g.args))
        if isinstance(g, (Exists, Forall)):
            raise ValueError("nnf expects a quantifier-free formula")
        return neg(g)

    return pos(f)


# ---------------------------------------------------------------------------
# evaluation


class ArityError(ValueError):
    pass


class UnboundedQuantifierError(ValueError):
    pass


def _atom_holds(a: Atom, env: Mapping[str, Number]) -> bool:
    v = a.term.evaluate(env)
    if isinstance(a, Ge):
        return v >= 0
    if isinstance(v, Fraction):
        return False
    return v % a.modulus == 0


def _quantifier_range(var: str, body: Formula, env: Mapping[str, Number], box: int,
                      universal: bool) -> range:
    """Search range for a bounded quantifier, shrunk by guard atoms.

    For ``exists v. (g_1 and ... and phi)`` every witness satisfies the
    top-level linear conjuncts ``g_i`` in ``v``; for ``forall v. (g -> phi)``
    (printed as an Or with negated guards) every counterexample satisfies
    the guards.  Shrinking is therefore exact.
    """
    lo, hi = -box, box
    if universal:
        guards = [neg(a) for a in (body.args if isinstance(body, Or) else (body,)) if isinstance(a, Ge)]
    else:
        guards = [a for a in (body.args if isinstance(body, And) else (body,)) if isinstance(a, Ge)]
    for g in guards:
        if not isinstance(g, Ge):
            continue
        c = g.term.coeff(var)
        if c == 0 or any(v != var and v not in env for v in g.term.variables):
            continue
        rest = g.term.drop(var).evaluate(env)
        # c*v + rest >= 0
        if c > 0:
            lo = max(lo, -((rest) // c))
        else:
            hi = min(hi, rest // (-c))
    return range(lo, hi + 1)


def evaluate(f: Formula, env: Mapping[str, Number], box: int | None = None) -> bool:
    """Truth value of ``f`` under ``env``.

    Quantified variables range over ``[-box, box]``; ``box=None`` rejects
    quantifiers.
    """
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, (Ge, Dvd)):
        return _atom_holds(f, env)
    if isinstance(f, Not):
        return not evaluate(f.arg, env, box)
    if isinstance(f, And):
        return all(evaluate(a, env, box) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, env, box) for a in f.args)
    if isinstance(f, (Exists, Forall)):
        if box is None:
            raise UnboundedQuantifierError(
                f"quantifier over {f.var!r} needs a search box for evaluation")
        universal = isinstance(f, Forall)
        local = dict(env)
        for val in _quantifier_range(f.var, f.body, env, box, universal):
            local[f.var] = val
            r = evaluate(f.body, local, box)
            if universal and not r:
                return False
            if not universal and r:
                return True
        return universal
    raise TypeError(f"not a formula: {f!r}")


def evaluate_formula(f: Formula, point: Sequence[int] | Mapping[str, int],
                     variables: Sequence[str] | None = None, box: int | None = None) -> bool:
    """Evaluate ``f`` at a point given as a tuple (ordered by ``variables``,
    default: free variables in order of occurrence) or as a mapping."""
    if isinstance(point, Mapping):
        missing = [v for v in free_variables(f) if v not in point]
        if missing:
            raise ArityError(f"no value for {', '.join(missing)}")
        return evaluate(f, point, box)
    names = tuple(variables) if variables is not None else free_variables(f)
    if len(names) != len(point):
        raise ArityError(f"expected {len(names)} values ({', '.join(names)}), got {len(point)}")
    return evaluate(f, dict(zip(names, point)), box)


# ---------------------------------------------------------------------------
# printing

_PREC = {Or: 1, And: 2}


def _fmt_atom(a: Atom) -> str:
    t = a.term
    if isinstance(a, Ge):
        if t.coeffs[0][1] < 0:
            lhs = format_linear(LinearTerm(tuple((v, -c) for v, c in t.coeffs), 0), with_const=False)
            return f"{lhs} <= {t.const}"
        lhs = format_linear(LinearTerm(t.coeffs, 0), with_const=False)
        return f"{lhs} >= {-t.const}"
    lhs = format_linear(LinearTerm(t.coeffs, 0), with_const=False)
    return f"{lhs} mod {a.modulus} = {(-t.const) % a.modulus}"


def _equalities(args: Sequence[Formula]) -> list[str]:
    """Print adjacent ``t >= 0, -t >= 0`` (t with positive leading
    coefficient) as ``t = c``; this is exactly what the parser builds."""
    out: list[str] = []
    i = 0
    while i < len(args):
        a = args[i]
        if (isinstance(a, Ge) and i + 1 < len(args) and args[i + 1] == Ge(-a.term)
                and a.term.coeffs[0][1] > 0):
            lhs = format_linear(LinearTerm(a.term.coeffs, 0), with_const=False)
            out.append(f"{lhs} = {-a.term.const}")
            i += 2
            continue
        out.append(format_formula(a, 3))
        i += 1
    return out


def format_formula(f: Formula, ctx: int = 0) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, (Ge, Dvd)):
        return _fmt_atom(f)
    if isinstance(f, Not):
        return f"not {format_formula(f.arg, 3)}"
    if isinstance(f, (And, Or)):
        p = _PREC[type(f)]
        word = " and " if isinstance(f, And) else " or "
        items = _equalities(f.args) if isinstance(f, And) else [format_formula(a, p + 1) for a in f.args]
        if len(items) == 1:
            return items[0]
        s = word.join(items)
        return f"({s})" if ctx > p else s
    if isinstance(f, (Exists, Forall)):
        q = "exists" if isinstance(f, Exists) else "forall"
        s = f"{q} {f.var}. {format_formula(f.body, 0)}"
        return f"({s})" if ctx > 0 else s
    raise TypeError(f"not a formula: {f!r}")
