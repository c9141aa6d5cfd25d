"""Sparse multivariate polynomials with rational coefficients.

Used for exponents and polynomial factors of constructible functions, where
the variables are named Presburger variables.  Values are immutable and
hashable; the monomial dictionary is stored as a sorted tuple.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Union

from .presburger.terms import LinearTerm

Monomial = tuple[tuple[str, int], ...]
Scalar = Union[int, Fraction]


def _norm(c: Fraction) -> Scalar:
    return int(c.numerator) if c.denominator == 1 else c


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


class Poly:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | Iterable[tuple[Monomial, Scalar]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Fraction] = {}
        for m, c in items:
            acc[m] = acc.get(m, Fraction(0)) + c
        self.terms: tuple[tuple[Monomial, Scalar], ...] = tuple(
            sorted(((m, _norm(Fraction(c))) for m, c in acc.items() if c != 0), key=_order))
        self._hash = hash(self.terms)

    # -- constructors ------------------------------------------------------
    @staticmethod
    def const(c: Scalar) -> "Poly":
        return Poly({(): c})

    @staticmethod
    def var(name: str) -> "Poly":
        return Poly({((name, 1),): 1})

    @staticmethod
    def from_linear(t: LinearTerm) -> "Poly":
        return Poly([(((v, 1),), c) for v, c in t.coeffs] + [((), t.const)])

    # -- protocol ----------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        return format_poly(self)

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- arithmetic --------------------------------------------------------
    @staticmethod
    def _lift(x: "Poly | Scalar | LinearTerm") -> "Poly":
        if isinstance(x, Poly):
            return x
        if isinstance(x, LinearTerm):
            return Poly.from_linear(x)
        return Poly.const(x)

    def __add__(self, other) -> "Poly":
        o = Poly._lift(other)
        return Poly(list(self.terms) + list(o.terms))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([(m, -c) for m, c in self.terms])

    def __sub__(self, other) -> "Poly":
        return self + (-Poly._lift(other))

    def __rsub__(self, other) -> "Poly":
        return Poly._lift(other) - self

    def __mul__(self, other) -> "Poly":
        o = Poly._lift(other)
        acc: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms:
            for m2, c2 in o.terms:
                m = _mono_mul(m1, m2)
                acc[m] = acc.get(m, Fraction(0)) + Fraction(c1) * c2
        return Poly(acc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- queries -----------------------------------------------------------
    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(sorted({v for m, _ in self.terms for v, _ in m}))

    def is_constant(self) -> bool:
        return all(not m for m, _ in self.terms)

    def constant_term(self) -> Scalar:
        for m, c in self.terms:
            if not m:
                return c
        return 0

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m, _ in self.terms), default=0)

    def degree_in(self, v: str) -> int:
        return max((dict(m).get(v, 0) for m, _ in self.terms), default=0)

    def is_affine(self) -> bool:
        return self.degree() <= 1

    def to_linear(self) -> LinearTerm:
        if not self.is_affine():
            raise ValueError(f"not affine: {self}")
        coeffs = [(m[0][0], c) for m, c in self.terms if m]
        return LinearTerm.make(coeffs, self.constant_term())

    def coefficients_in(self, v: str) -> dict[int, "Poly"]:
        """``{k: p_k}`` with ``self = sum p_k * v**k``."""
        out: dict[int, list] = {}
        for m, c in self.terms:
            d = dict(m)
            k = d.pop(v, 0)
            out.setdefault(k, []).append((tuple(sorted(d.items())), c))
        return {k: Poly(items) for k, items in sorted(out.items())}

    def coefficient_split(self, vs: Iterable[str]) -> dict[tuple[int, ...], "Poly"]:
        """Group by the exponent vector of ``vs``; values are polynomials in the rest."""
        vs = tuple(vs)
        out: dict[tuple[int, ...], list] = {}
        for m, c in self.terms:
            d = dict(m)
            key = tuple(d.pop(v, 0) for v in vs)
            out.setdefault(key, []).append((tuple(sorted(d.items())), c))
        return {k: Poly(items) for k, items in sorted(out.items())}

    def denominator(self) -> int:
        d = 1
        for _, c in self.terms:
            if isinstance(c, Fraction):
                d = lcm(d, c.denominator)
        return d

    # -- evaluation / substitution ----------------------------------------
    def evaluate(self, env: Mapping[str, Scalar]) -> Scalar:
        total = Fraction(0)
        for m, c in self.terms:
            t = Fraction(c)
            for v, e in m:
                t *= Fraction(env[v]) ** e
            total += t
        return _norm(total)

    def substitute(self, mapping: Mapping[str, "Poly | LinearTerm | Scalar"]) -> "Poly":
        if not mapping or not any(v in mapping for v in self.variables):
            return self
        lifted = {k: Poly._lift(x) for k, x in mapping.items()}
        out = Poly()
        cache: dict[tuple[str, int], Poly] = {}
        for m, c in self.terms:
            t = Poly.const(c)
            rest: list[tuple[str, int]] = []
            for v, e in m:
                if v in lifted:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = lifted[v] ** e
                    t = t * cache[key]
                else:
                    rest.append((v, e))
            out = out + t * Poly({tuple(rest): 1})
        return out

    def rename(self, mapping: Mapping[str, str]) -> "Poly":
        return self.substitute({a: Poly.var(b) for a, b in mapping.items()})


def _order(item: tuple[Monomial, Scalar]):
    m, _ = item
    return (-sum(e for _, e in m), m)


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    parts: list[str] = []
    for m, c in p.terms:
        mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
        mag = abs(c)
        cs = f"{mag.numerator}/{mag.denominator}" if isinstance(mag, Fraction) else str(mag)
        if not mono:
            body = cs
        elif mag == 1:
            body = mono
        else:
            body = f"{cs}*{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)
