"""Presburger constructible functions.

A function is a finite sum of terms

    c * 1_X(v) * L^E(v) * P(v) * prod_k 1/(1 - L^g_k(v))

over named integer variables ``v = (params, lattice)``, where ``c`` lies in
the coefficient ring of the mode (an :class:`AElement` formally, a rational
at fixed ``q``), ``X`` is a quantifier-free support formula, ``E`` and ``P``
are polynomials with rational coefficients taking integer values on ``X``,
and the ``g_k`` are affine in the parameters.  Piecewise-affine inputs
(``|s|``, ``max``, ...) are expanded into guarded terms at construction, so
on its support every term has affine exponent and factors, as the
generators of the algebra do.

Two extensions beyond that algebra are admitted because lattice sums need
them: exponents may contain products ``b(s) * y`` of a parameter-affine
coefficient with a lattice variable (``L^{s y}``), and pole factors
``1/(1 - L^g)`` arise from geometric series.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Sequence, Union

from .poly import Poly
from .presburger.formula import (
    TRUE, Bot, Formula, Top, conj, evaluate, free_variables, substitute,
)
from .presburger.qe import is_satisfiable
from .presburger.terms import LinearTerm
from .ring import FORMAL, AElement, FixedQ, Formal, Mode

Coeff = Union[AElement, Fraction]


class DomainError(ValueError):
    pass


class NonAffineOnPiece(ValueError):
    pass


@lru_cache(maxsize=65536)
def _sat(f: Formula) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    return is_satisfiable(f)


def _content(p: Poly) -> Fraction:
    """Positive rational ``c`` with ``p / c`` having coprime integer
    coefficients, sign fixed by the leading term."""
    if not p.terms:
        return Fraction(1)
    num = 0
    den = 1
    for _, c in p.terms:
        c = Fraction(c)
        num = gcd(num, c.numerator)
        den = den * c.denominator // gcd(den, c.denominator)
    c = Fraction(num, den)
    return c if p.terms[0][1] > 0 else -c


@dataclass(frozen=True)
class Term:
    coeff: Coeff
    support: Formula = TRUE
    exponent: Poly = field(default_factory=Poly)
    factor: Poly = field(default_factory=lambda: Poly.const(1))
    poles: tuple[Poly, ...] = ()

    def normalized(self, mode: Mode) -> "Term":
        """Pull the rational content of ``factor`` into ``coeff``."""
        if not self.factor.terms:
            return replace(self, coeff=mode.zero(), factor=Poly.const(1))
        c = _content(self.factor)
        if c == 1:
            return self
        return replace(self, coeff=self.coeff * c,
                       factor=Poly([(m, Fraction(a) / c) for m, a in self.factor.terms]))

    def key(self):
        return (self.support, self.exponent, self.factor, self.poles)

    def substitute(self, mapping: Mapping[str, LinearTerm | Poly]) -> "Term":
        lin = {k: v for k, v in mapping.items()}
        sup_map = {k: (v.to_linear() if isinstance(v, Poly) else v) for k, v in lin.items()}
        return Term(self.coeff, substitute(self.support, sup_map),
                    self.exponent.substitute(lin), self.factor.substitute(lin),
                    tuple(sorted((g.substitute(lin) for g in self.poles), key=str)))

    def value(self, env: Mapping[str, int], mode: Mode) -> Coeff:
        if not evaluate(self.support, env):
            return mode.zero()
        val = mode.coerce(self.coeff) if isinstance(mode, FixedQ) else self.coeff
        p = self.factor.evaluate(env)
        if p == 0:
            return mode.zero()
        val = val * mode.L_power(self.exponent.evaluate(env)) * p
        for g in self.poles:
            e = Fraction(g.evaluate(env))
            if e.denominator != 1:
                raise ValueError(f"non-integral pole exponent {e}")
            val = val * mode.pole(int(e))
        return val

    def __str__(self) -> str:
        return format_term(self)


def _fold_poles(t: Term, mode: Mode) -> Term:
    """Move constant pole factors and a constant exponent into ``coeff``."""
    keep = []
    c = t.coeff
    for g in t.poles:
        if g.is_constant():
            e = Fraction(g.constant_term())
            if e == 0 or e.denominator != 1:
                raise ValueError(f"invalid pole exponent {e}")
            c = c * mode.pole(int(e))
        else:
            keep.append(g)
    e = t.exponent
    if e.terms and e.is_constant() and Fraction(e.constant_term()).denominator == 1:
        c = c * mode.L_power(e.constant_term())
        e = Poly()
    if len(keep) == len(t.poles) and e is t.exponent:
        return t
    return Term(c, t.support, e, t.factor, tuple(keep))


@dataclass(frozen=True)
class ConstructibleFunction:
    params: tuple[str, ...]
    lattice: tuple[str, ...] = ()
    terms: tuple[Term, ...] = ()
    domain: Formula = TRUE
    mode: Mode = FORMAL

    @property
    def variables(self) -> tuple[str, ...]:
        return self.params + self.lattice

    # -- construction ------------------------------------------------------
    @staticmethod
    def zero(params: Sequence[str] = (), lattice: Sequence[str] = (), domain: Formula = TRUE,
             mode: Mode = FORMAL) -> "ConstructibleFunction":
        return ConstructibleFunction(tuple(params), tuple(lattice), (), domain, mode)

    @staticmethod
    def constant(c, params: Sequence[str] = (), lattice: Sequence[str] = (), domain: Formula = TRUE,
                 mode: Mode = FORMAL) -> "ConstructibleFunction":
        return ConstructibleFunction(tuple(params), tuple(lattice), (Term(mode.coerce(c)),), domain, mode)

    @staticmethod
    def monomial(params: Sequence[str], lattice: Sequence[str] = (), coeff=1,
                 exponent: Poly | LinearTerm | int = 0, factor: Poly | LinearTerm | int = 1,
                 support: Formula = TRUE, domain: Formula = TRUE,
                 mode: Mode = FORMAL) -> "ConstructibleFunction":
        t = Term(mode.coerce(coeff), support, Poly._lift(exponent), Poly._lift(factor))
        return ConstructibleFunction(tuple(params), tuple(lattice), (t,), domain, mode)

    def with_terms(self, terms: Iterable[Term]) -> "ConstructibleFunction":
        return replace(self, terms=tuple(terms))

    # -- evaluation --------------------------------------------------------
    def env(self, point: Sequence[int] | Mapping[str, int]) -> dict[str, int]:
        if isinstance(point, Mapping):
            missing = [v for v in self.variables if v not in point]
            if missing:
                raise DomainError(f"no value for {', '.join(missing)}")
            return dict(point)
        if len(point) != len(self.variables):
            raise DomainError(f"expected {len(self.variables)} values for {self.variables}, got {len(point)}")
        return dict(zip(self.variables, point))

    def in_domain(self, point) -> bool:
        return evaluate(self.domain, self.env(point))

    def evaluate(self, point: Sequence[int] | Mapping[str, int], mode: Mode | None = None) -> Coeff:
        env = self.env(point)
        if not evaluate(self.domain, env):
            raise DomainError(f"point {env} outside the domain {self.domain}")
        return self._value(env, mode or self.mode)

    def _value(self, env: Mapping[str, int], mode: Mode) -> Coeff:
        if isinstance(mode, Formal) and isinstance(self.mode, FixedQ):
            raise ValueError("a fixed-q function has no formal value")
        total = mode.zero()
        for t in self.terms:
            total = total + t.value(env, mode)
        return total

    def is_zero_at(self, point, q: FixedQ | None = None) -> bool:
        """Zero test of the value at ``point`` (formally, or at base ``q``)."""
        v = self.evaluate(point, q)
        return v == 0 if isinstance(v, Fraction) else v.is_zero()

    # -- algebra -----------------------------------------------------------
    def _check(self, other: "ConstructibleFunction") -> None:
        if other.variables != self.variables or other.domain != self.domain:
            raise DomainError("functions live on different domains")
        if type(other.mode) is not type(self.mode) or other.mode != self.mode:
            raise DomainError("functions use different coefficient modes")

    def __add__(self, other: "ConstructibleFunction") -> "ConstructibleFunction":
        self._check(other)
        return self.with_terms(self.terms + other.terms)

    def __neg__(self) -> "ConstructibleFunction":
        return self.with_terms(replace(t, coeff=-t.coeff) for t in self.terms)

    def __sub__(self, other: "ConstructibleFunction") -> "ConstructibleFunction":
        return self + (-other)

    def __mul__(self, other: "ConstructibleFunction") -> "ConstructibleFunction":
        if not isinstance(other, ConstructibleFunction):
            c = self.mode.coerce(other)
            return self.with_terms(replace(t, coeff=t.coeff * c) for t in self.terms)
        self._check(other)
        out = []
        for a in self.terms:
            for b in other.terms:
                sup = conj(a.support, b.support)
                if isinstance(sup, Bot):
                    continue
                out.append(Term(a.coeff * b.coeff, sup, a.exponent + b.exponent,
                                a.factor * b.factor, tuple(sorted(a.poles + b.poles, key=str))))
        return self.with_terms(out)

    __rmul__ = __mul__

    def square(self) -> "ConstructibleFunction":
        """``self * self`` with symmetric cross terms combined."""
        out = []
        ts = self.terms
        for i, a in enumerate(ts):
            for j in range(i, len(ts)):
                b = ts[j]
                sup = conj(a.support, b.support)
                if isinstance(sup, Bot):
                    continue
                c = a.coeff * b.coeff * (1 if i == j else 2)
                out.append(Term(c, sup, a.exponent + b.exponent, a.factor * b.factor,
                                tuple(sorted(a.poles + b.poles, key=str))))
        return self.with_terms(out).simplify()

    def restrict(self, f: Formula) -> "ConstructibleFunction":
        """Multiply by the indicator of ``f``."""
        return self.with_terms(replace(t, support=conj(t.support, f)) for t in self.terms)

    def with_domain(self, domain: Formula) -> "ConstructibleFunction":
        return replace(self, domain=domain)

    def substitute(self, mapping: Mapping[str, LinearTerm | Poly], params: Sequence[str] | None = None,
                   lattice: Sequence[str] | None = None, domain: Formula | None = None) -> "ConstructibleFunction":
        terms = [t.substitute(mapping) for t in self.terms]
        return ConstructibleFunction(
            tuple(params) if params is not None else self.params,
            tuple(lattice) if lattice is not None else self.lattice,
            tuple(terms), domain if domain is not None else self.domain, self.mode)

    def specialize(self, q: FixedQ) -> "ConstructibleFunction":
        return ConstructibleFunction(self.params, self.lattice,
                                     tuple(replace(t, coeff=q.coerce(t.coeff)) for t in self.terms),
                                     self.domain, q)

    def simplify(self, prune: bool = True) -> "ConstructibleFunction":
        """Collect like terms, drop zero coefficients and (optionally) terms
        with unsatisfiable support."""
        acc: dict = {}
        order: list = []
        for t in self.terms:
            if isinstance(t.support, Bot):
                continue
            t = _fold_poles(t.normalized(self.mode), self.mode)
            k = t.key()
            if k in acc:
                acc[k] = replace(acc[k], coeff=acc[k].coeff + t.coeff)
            else:
                acc[k] = t
                order.append(k)
        out = []
        for k in order:
            t = acc[k]
            if self.mode.is_zero(t.coeff):
                continue
            if prune and not _sat(conj(t.support, self.domain)):
                continue
            out.append(t)
        return self.with_terms(out)

    def __str__(self) -> str:
        return format_function(self)

    def to_json(self) -> dict:
        return function_to_json(self)


# ---------------------------------------------------------------------------
# zero loci combinators


def combine_zero_loci(op: str, hs: Sequence[ConstructibleFunction],
                      like: ConstructibleFunction | None = None) -> ConstructibleFunction:
    """``intersection`` -> sum of squares, ``union`` -> product.

    ``like`` supplies variables, domain and mode when ``hs`` is empty
    (the empty intersection is the zero function, the empty union the
    constant 1).
    """
    if not hs:
        if like is None:
            return ConstructibleFunction.zero() if op == "intersection" else ConstructibleFunction.constant(1)
        base = ConstructibleFunction.zero(like.params, like.lattice, like.domain, like.mode)
        return base if op == "intersection" else ConstructibleFunction.constant(
            1, like.params, like.lattice, like.domain, like.mode)
    first = hs[0]
    for h in hs[1:]:
        first._check(h)
    if op == "intersection":
        out = first.square()
        for h in hs[1:]:
            out = out + h.square()
        return out.simplify()
    if op == "union":
        out = first
        for h in hs[1:]:
            out = (out * h).simplify()
        return out
    raise ValueError(f"unknown combinator {op!r}")


# ---------------------------------------------------------------------------
# monomials on rectilinear pieces


@dataclass(frozen=True)
class Monomial:
    a: tuple[int, ...]
    b: tuple[int, ...]
    coeff: ConstructibleFunction      # over params + bounded target coordinates


@dataclass(frozen=True)
class MergedMonomialForm:
    piece: object
    monomials: tuple[Monomial, ...]

    def evaluate(self, point: Mapping[str, int], mode: Mode | None = None) -> Coeff:
        """Value at a point given in target coordinates."""
        total = None
        for m in self.monomials:
            env = {v: point[v] for v in m.coeff.variables}
            c = m.coeff._value(env, mode or m.coeff.mode)
            x = 1
            for z, a in zip(self.piece.unbounded, m.a):
                x *= point[z] ** a
            mode_ = mode or m.coeff.mode
            val = c * x * mode_.L_power(sum(b * point[z] for z, b in zip(self.piece.unbounded, m.b)))
            total = val if total is None else total + val
        return total if total is not None else (mode or FORMAL).zero()


def to_piece_coordinates(f: ConstructibleFunction, piece) -> ConstructibleFunction:
    """``f`` pulled back along the inverse map of ``piece``, over
    ``params + zvars``, with term supports decided by the piece markers when
    they were computed for ``f``'s terms."""
    inv = {y: t for y, t in zip(piece.lattice, piece.inverse)}
    terms = []
    use_markers = len(piece.markers) == len(f.terms)
    for i, t in enumerate(f.terms):
        u = t.substitute(inv)
        if use_markers:
            u = replace(u, support=piece.markers[i])
        terms.append(u)
    return ConstructibleFunction(f.params, piece.zvars, tuple(terms), piece.target(), f.mode)


def merge_monomials(f: ConstructibleFunction, piece) -> MergedMonomialForm:
    """Write ``f`` on ``piece`` as ``sum c_i(s, lambda) x^a_i L^{b_i . x}``
    over the unbounded coordinates ``x`` with distinct ``(a_i, b_i)``."""
    g = to_piece_coordinates(f, piece)
    xs = piece.unbounded
    groups: dict[tuple, list[Term]] = {}
    order: list[tuple] = []
    for t in g.terms:
        if any(x in free_variables(t.support) for x in xs):
            raise NonAffineOnPiece(f"support {t.support} is not decided on the piece")
        b = []
        e_rest = t.exponent
        for x in xs:
            cs = t.exponent.coefficients_in(x)
            if any(k > 1 for k in cs):
                raise NonAffineOnPiece(f"exponent {t.exponent} is not affine in {x}")
            bx = cs.get(1, Poly())
            if not bx.is_constant():
                raise NonAffineOnPiece(
                    f"exponent coefficient {bx} of {x} depends on parameters; split the parameter space first")
            b.append(Fraction(bx.constant_term()))
            e_rest = e_rest.substitute({x: 0})
        if any(v.denominator != 1 for v in b):
            raise NonAffineOnPiece(f"non-integral exponent coefficient in {t.exponent}")
        b = tuple(int(v) for v in b)
        for g_ in t.poles:
            if any(x in g_.variables for x in xs):
                raise NonAffineOnPiece("pole factor depends on a lattice coordinate")
        for a, p in t.factor.coefficient_split(xs).items():
            key = (a, b)
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append(Term(t.coeff, t.support, e_rest, p, t.poles))
    monos = []
    for key in sorted(order):
        c = ConstructibleFunction(f.params, tuple(z for z, _ in piece.bounded), tuple(groups[key]),
                                  piece.bounded_part(), f.mode).simplify()
        if c.terms:
            monos.append(Monomial(key[0], key[1], c))
    return MergedMonomialForm(piece, tuple(monos))


# ---------------------------------------------------------------------------
# printing and JSON


def _fmt_coeff(c: Coeff) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return str(c)


def format_term(t: Term) -> str:
    parts = [f"coeff = {_fmt_coeff(t.coeff)}"]
    if t.exponent.terms:
        parts.append(f"exp = {t.exponent}")
    if t.factor != Poly.const(1):
        parts.append(f"factor = {t.factor}")
    if t.poles:
        parts.append("poles = [" + ", ".join(str(g) for g in t.poles) + "]")
    if not isinstance(t.support, Top):
        parts.append(f"when {t.support}")
    return "term " + ", ".join(parts)


def format_function(f: ConstructibleFunction) -> str:
    head = f"func f({', '.join(f.params)}; {', '.join(f.lattice)})"
    lines = [head + " {"]
    for t in f.terms:
        lines.append(f"  {format_term(t)};")
    if not isinstance(f.domain, Top):
        lines.append(f"  domain {f.domain};")
    lines.append("}")
    return "\n".join(lines)


def coeff_to_json(c: Coeff):
    if isinstance(c, AElement):
        return {"element": str(c), **c.to_json()}
    return {"rational": str(c)}


def function_to_json(f: ConstructibleFunction) -> dict:
    return {
        "params": list(f.params),
        "lattice": list(f.lattice),
        "mode": str(f.mode),
        "domain": str(f.domain),
        "terms": [
            {
                "coeff": coeff_to_json(t.coeff),
                "support": str(t.support),
                "exponent": str(t.exponent),
                "factor": str(t.factor),
                "poles": [str(g) for g in t.poles],
            }
            for t in f.terms
        ],
    }
