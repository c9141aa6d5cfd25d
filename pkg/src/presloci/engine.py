"""Lattice sums, loci of integrability / boundedness / identical vanishing,
and interpolation for Presburger constructible functions.

Sums are computed one lattice variable at a time (innermost last): every
slice of the support along ``y`` is ``y = offset + step*t`` with ``t`` in
``[0, W]`` or in ``N``, and ``sum_t t^a x^t`` has a closed form in
``x = L^beta``.  Terms whose ``beta`` is not negative are dropped from
unbounded slices; on the integrability locus their merged coefficients
vanish, so the result is exact there.

Vanishing is decided through finitely many evaluation points per slice: a
nonzero exponential polynomial ``sum_j P_j(t) x_j^t`` with distinct bases
has at most ``sum_j (deg P_j + 1) - 1`` real zeros, so it is identically
zero on an interval iff it vanishes at that many plus one consecutive
points.  Integrability and boundedness reduce to vanishing of the
divergent part of ``f`` on every rectilinear piece.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from .constructible import (
    ConstructibleFunction, Term, combine_zero_loci, to_piece_coordinates,
)
from .poly import Poly
from .presburger.formula import (
    FALSE, TRUE, Bot, Formula, Top, conj, disj, eq, exists_many, free_variables, fresh_name, ge, neg,
)
from .presburger.functions import PiecewiseAffineFunction
from .presburger.qe import eliminate_quantifiers, tidy
from .presburger.terms import LinearTerm
from .rectilinear import rectilinearize, slice_1d
from .ring import FORMAL, FixedQ, Mode, padd, pneg

KINDS = ("integrability", "boundedness", "vanishing")
_KIND_ALIASES = {"int": "integrability", "bdd": "boundedness", "iva": "vanishing"}


class UnsupportedIntegrand(ValueError):
    """The exponent is not affine along a lattice direction with a
    parameter-affine slope."""


# ---------------------------------------------------------------------------
# one-variable closed forms


@lru_cache(maxsize=None)
def eulerian_numerator(a: int) -> tuple[Fraction, ...]:
    """``N_a`` with ``sum_{t>=0} t^a x^t = N_a(x) / (1 - x)^(a+1)``."""
    n: tuple = (Fraction(1),)
    for k in range(1, a + 1):
        deriv = tuple(i * c for i, c in enumerate(n))[1:] or (Fraction(0),)
        # x N' (1 - x) + k x N
        xd = (Fraction(0),) + deriv
        n = padd(padd(xd, pneg((Fraction(0),) + xd)), tuple(k * c for c in ((Fraction(0),) + n)))
    return tuple(Fraction(c) for c in n)


@lru_cache(maxsize=None)
def faulhaber(a: int) -> Poly:
    """``F_a(W) = sum_{t=0}^{W} t^a`` as a polynomial in ``W``."""
    w1 = Poly.var("W") + 1
    if a == 0:
        return w1
    acc = w1 ** (a + 1)
    for k in range(a):
        acc = acc - faulhaber(k) * comb(a + 1, k)
    return acc * Fraction(1, a + 1)


def _geometric_value(a: int, b: int, mode: Mode):
    """``sum_{t>=0} t^a L^(b t)`` in ``mode`` (requires ``b != 0``)."""
    total = mode.zero()
    for k, c in enumerate(eulerian_numerator(a)):
        if c:
            total = total + mode.L_power(k * b) * c
    return total * mode.pole(b) ** (a + 1)


def sum_geometric_closed_form(a: int, b: int):
    """Exact value of ``sum_{y>=0} y^a L^(b y)`` as an element of ``A``."""
    if a < 0:
        raise ValueError("a must be a nonnegative integer")
    if b >= 0:
        raise ValueError(f"the series diverges for b = {b} >= 0")
    return _geometric_value(a, b, FORMAL)


def sum_finite_range(a: int, b: int, upper: PiecewiseAffineFunction | LinearTerm,
                     mode: Mode = FORMAL, params: Sequence[str] | None = None) -> ConstructibleFunction:
    """``sum_{y=0}^{upper(s)} y^a L^(b y)`` as a function of the inputs of
    ``upper`` (zero where ``upper < 0``)."""
    if isinstance(upper, LinearTerm):
        upper = PiecewiseAffineFunction.affine(tuple(params) if params else upper.variables, upper)
    y = fresh_name("y", set(upper.inputs))
    yv = LinearTerm.var(y)
    terms = []
    for g, (u,) in upper.pieces:
        sup = conj(g, ge(yv), ge(u - yv))
        terms.append(Term(mode.one(), sup, Poly.var(y) * b, Poly.var(y) ** a))
    f = ConstructibleFunction(upper.inputs, (y,), tuple(terms), TRUE, mode)
    return _sum_lattice(f)


# ---------------------------------------------------------------------------
# slicing helpers


def _markers(f: ConstructibleFunction) -> tuple[Formula, list[Formula]]:
    ms = [conj(f.domain, t.support) for t in f.terms]
    return disj(*ms), ms


def _along(t: Term, y: str, sl, tv: str, lattice: Sequence[str]):
    """Term restricted to a slice, as ``(E0, beta, {a: P_a})`` in ``tv``."""
    u = t.substitute({y: sl.offset + LinearTerm.var(tv, sl.step)})
    cs = u.exponent.coefficients_in(tv)
    if any(k > 1 for k in cs):
        raise UnsupportedIntegrand(f"exponent {t.exponent} is not affine in {y}")
    beta = cs.get(1, Poly())
    if any(v in lattice for v in beta.variables):
        raise UnsupportedIntegrand(f"slope of {t.exponent} along {y} depends on lattice variables")
    if not beta.is_affine():
        raise UnsupportedIntegrand(f"slope {beta} of {t.exponent} along {y} is not affine in the parameters")
    return u, cs.get(0, Poly()), beta, u.factor.coefficients_in(tv)


def _const_int(p: Poly) -> int | None:
    if p.is_constant():
        c = Fraction(p.constant_term())
        if c.denominator != 1:
            raise UnsupportedIntegrand(f"non-integral slope {c}")
        return int(c)
    return None


def _sum_slice(f: ConstructibleFunction, y: str, sl, rest: Sequence[str]) -> list[Term]:
    mode = f.mode
    tv = fresh_name("t", set(f.variables))
    out: list[Term] = []
    for t, m in zip(f.terms, sl.markers):
        base = conj(sl.guard, m)
        if isinstance(base, Bot):
            continue
        u, e0, beta, parts = _along(t, y, sl, tv, rest)
        b = _const_int(beta)
        bl = None if b is not None else beta.to_linear()
        for a, pa in parts.items():
            if sl.width is None:
                if b is not None:
                    if b >= 0:
                        continue
                    out.append(Term(u.coeff * _geometric_value(a, b, mode), base, e0, pa, u.poles))
                else:
                    sup = conj(base, ge(-bl - 1))
                    out.extend(_series_terms(u.coeff, sup, e0, beta, pa, u.poles, a, Fraction(1)))
                continue
            W = Poly.from_linear(sl.width)
            if b == 0:
                out.append(Term(u.coeff, base, e0, pa * faulhaber(a).substitute({"W": W}), u.poles))
                continue
            if b is not None:
                out.append(Term(u.coeff * _geometric_value(a, b, mode), base, e0, pa, u.poles))
                for j in range(a + 1):
                    c = u.coeff * _geometric_value(j, b, mode) * (-comb(a, j))
                    out.append(Term(c, base, e0 + (W + 1) * b, pa * (W + 1) ** (a - j), u.poles))
                continue
            zero = conj(base, eq(bl))
            out.append(Term(u.coeff, zero, e0, pa * faulhaber(a).substitute({"W": W}), u.poles))
            nz = conj(base, neg(eq(bl)))
            out.extend(_series_terms(u.coeff, nz, e0, beta, pa, u.poles, a, Fraction(1)))
            for j in range(a + 1):
                out.extend(_series_terms(u.coeff, nz, e0 + (W + 1) * beta, beta,
                                         pa * (W + 1) ** (a - j), u.poles, j, Fraction(-comb(a, j))))
    return out


def _series_terms(c, sup, e0: Poly, beta: Poly, pa: Poly, poles, a: int, scale: Fraction) -> list[Term]:
    """Terms of ``c * scale * L^e0 * pa * sum_t t^a L^(beta t)`` for a
    parametric slope ``beta``."""
    out = []
    pl = tuple(sorted(poles + (beta,) * (a + 1), key=str))
    for k, n in enumerate(eulerian_numerator(a)):
        if n:
            out.append(Term(c * (n * scale), sup, e0 + beta * k, pa, pl))
    return out


def _param_domain(f: ConstructibleFunction) -> Formula:
    if isinstance(f.domain, Top):
        return TRUE
    fv = free_variables(f.domain)
    lat = [y for y in f.lattice if y in fv]
    if not lat:
        return f.domain
    return tidy(eliminate_quantifiers(exists_many(lat, f.domain)))


def _sum_lattice(f: ConstructibleFunction) -> ConstructibleFunction:
    S = _param_domain(f)
    g = f
    while g.lattice:
        y, rest = g.lattice[-1], g.lattice[:-1]
        union, ms = _markers(g)
        terms: list[Term] = []
        for sl in slice_1d(union, y, ms):
            terms.extend(_sum_slice(g, y, sl, rest))
        g = ConstructibleFunction(g.params, rest, tuple(terms), TRUE, g.mode).simplify()
    return ConstructibleFunction(g.params, (), g.terms, S, g.mode).simplify()


# ---------------------------------------------------------------------------
# vanishing


def _zero_count_bound(items) -> int:
    """``sum over distinct slopes (max degree + 1) - 1``."""
    deg: dict[Poly, int] = {}
    for beta, parts in items:
        d = max(parts) if parts else 0
        deg[beta] = max(deg.get(beta, 0), d)
    return sum(d + 1 for d in deg.values()) - 1


def _vanishing_components(f: ConstructibleFunction) -> list[ConstructibleFunction]:
    """Functions of the parameters whose common zero set is the locus where
    ``f(s, .)`` vanishes identically."""
    f = f.simplify()
    if not f.terms:
        return []
    if not f.lattice:
        return [f.with_domain(TRUE)]
    y, rest = f.lattice[-1], f.lattice[:-1]
    tv = fresh_name("t", set(f.variables))
    union, ms = _markers(f)
    out: list[ConstructibleFunction] = []
    seen: set = set()
    for sl in slice_1d(union, y, ms):
        live = [(t, m) for t, m in zip(f.terms, sl.markers) if not isinstance(conj(sl.guard, m), Bot)]
        if not live:
            continue
        info = []
        for t, _ in live:
            _, _, beta, parts = _along(t, y, sl, tv, rest)
            info.append((beta, [a for a, p in parts.items() if p]))
        D = _zero_count_bound(info)
        for j in range(D + 1):
            if sl.width is not None and sl.width.is_constant() and sl.width.const < j:
                break
            at = {y: sl.offset + sl.step * j}
            extra = ge(sl.width - j) if sl.width is not None and j > 0 else TRUE
            terms = []
            for t, m in live:
                u = t.substitute(at)
                terms.append(replace(u, support=conj(sl.guard, m, extra)))
            comp = ConstructibleFunction(f.params, rest, tuple(terms), TRUE, f.mode).simplify()
            if not comp.terms:
                continue
            for c in _vanishing_components(comp):
                if c.terms not in seen:
                    seen.add(c.terms)
                    out.append(c)
    return out


# ---------------------------------------------------------------------------
# integrability / boundedness


def _bad_condition(kind: str, slopes: Sequence[Poly], a: Sequence[int]) -> Formula:
    conds = []
    for beta, ak in zip(slopes, a):
        bl = beta.to_linear()
        if kind == "integrability":
            conds.append(ge(bl))
        else:
            conds.append(ge(bl - 1) if ak == 0 else ge(bl))
    return disj(*conds)


def _piece_split(f: ConstructibleFunction, piece, kind: str):
    """Terms of ``f`` on ``piece`` (target coordinates), split by monomial
    in the unbounded coordinates into ``(term, bad condition)``."""
    g = to_piece_coordinates(f, piece)
    xs = piece.unbounded
    out = []
    for t in g.terms:
        slopes = []
        for x in xs:
            cs = t.exponent.coefficients_in(x)
            if any(k > 1 for k in cs):
                raise UnsupportedIntegrand(f"exponent {t.exponent} is not affine in {x}")
            beta = cs.get(1, Poly())
            if any(v in piece.zvars for v in beta.variables) or not beta.is_affine():
                raise UnsupportedIntegrand(f"slope {beta} along {x} is not a parameter-affine function")
            slopes.append(beta)
        for a, pa in t.factor.coefficient_split(xs).items():
            mono = Poly.const(1)
            for x, k in zip(xs, a):
                mono = mono * Poly.var(x) ** k
            bad = _bad_condition(kind, slopes, a) if xs else FALSE
            out.append((replace(t, factor=pa * mono), bad))
    return g, out



def _pieces(f: ConstructibleFunction):
    union, ms = _markers(f)
    return rectilinearize(union, f.lattice, f.params, ms)


def _divergence_components(f: ConstructibleFunction, kind: str) -> list[ConstructibleFunction]:
    out = []
    seen = set()
    for piece in _pieces(f):
        g, split = _piece_split(f, piece, kind)
        bad_terms = [replace(t, support=conj(t.support, bad)) for t, bad in split]
        fb = ConstructibleFunction(f.params, piece.zvars, tuple(bad_terms), piece.target(), f.mode)
        for c in _vanishing_components(fb):
            if c.terms not in seen:
                seen.add(c.terms)
                out.append(c)
    return out


# ---------------------------------------------------------------------------
# public operations


@dataclass(frozen=True)
class LocusResult:
    kind: str
    witness: ConstructibleFunction
    mode: Mode

    def contains(self, s: Sequence[int] | dict, q: FixedQ | None = None) -> bool:
        """Whether ``s`` lies in the zero set of the witness (at base ``q``
        when given, else in the witness's own mode)."""
        return self.witness.is_zero_at(s, q)

    def is_everywhere(self) -> bool:
        """True when the witness is syntactically the zero function."""
        return not self.witness.terms

    def zero_set(self, box: Sequence[Sequence[int]], q: FixedQ | None = None) -> list[tuple[int, ...]]:
        from itertools import product
        pts = []
        for s in product(*box):
            if self.witness.in_domain(s) and self.contains(s, q):
                pts.append(tuple(s))
        return pts

    def to_json(self) -> dict:
        return {"kind": self.kind, "mode": str(self.mode), "witness": self.witness.to_json(),
                "everywhere": self.is_everywhere()}


@dataclass(frozen=True)
class SumResult:
    g: ConstructibleFunction
    validity: LocusResult

    def value(self, s: Sequence[int] = (), q: FixedQ | None = None):
        return self.g.evaluate(s, q)


def _in_mode(f: ConstructibleFunction, mode: Mode | None) -> ConstructibleFunction:
    if mode is None or mode == f.mode:
        return f
    if isinstance(mode, FixedQ):
        if isinstance(f.mode, FixedQ) and f.mode != mode:
            raise ValueError(f"function is fixed at {f.mode}, not {mode}")
        return f.specialize(mode)
    raise ValueError("a fixed-q function cannot be lifted to the formal mode")


def compute_locus(f: ConstructibleFunction, kind: str, mode: Mode | None = None) -> LocusResult:
    kind = _KIND_ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise ValueError(f"unknown locus kind {kind!r}")
    f = _in_mode(f, mode).simplify()
    S = _param_domain(f)
    like = ConstructibleFunction.zero(f.params, (), TRUE, f.mode)
    if kind == "vanishing":
        comps = _vanishing_components(f)
    else:
        comps = _divergence_components(f, kind)
    h = combine_zero_loci("intersection", comps, like=like) if comps else like
    return LocusResult(kind, h.with_domain(S).simplify(), f.mode)


def sum_over_lattice(f: ConstructibleFunction, mode: Mode | None = None) -> SumResult:
    f = _in_mode(f, mode).simplify()
    g = _sum_lattice(f)
    return SumResult(g, compute_locus(f, "integrability"))


def interpolate(f: ConstructibleFunction, mode: Mode | None = None) -> ConstructibleFunction:
    """A function integrable for every parameter that agrees with ``f``
    wherever ``f`` is integrable."""
    f = _in_mode(f, mode).simplify()
    terms = []
    for piece in _pieces(f):
        _, split = _piece_split(f, piece, "integrability")
        fwd = {z: t for z, t in zip(piece.zvars, piece.forward)}
        for t, bad in split:
            sup = conj(t.support, neg(bad))
            if isinstance(sup, Bot):
                continue
            u = replace(t, support=TRUE).substitute(fwd)
            terms.append(replace(u, support=conj(sup, piece.source)))
    return ConstructibleFunction(f.params, f.lattice, tuple(terms), f.domain, f.mode).simplify()
