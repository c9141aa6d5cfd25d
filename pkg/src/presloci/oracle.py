"""Independent checks for lattice sums and loci at fixed parameters.

Nothing here calls the summation or locus code of :mod:`presloci.engine`:
sums are compared against explicit partial sums with an exact geometric
tail majorant, and loci against per-monomial criteria applied after the
parameters have been substituted (so all exponent slopes are integers).
"""
from __future__ import annotations

from dataclasses import replace
from fractions import Fraction
from itertools import product
from math import comb
from typing import Sequence

from .constructible import ConstructibleFunction, merge_monomials
from .poly import Poly
from .presburger.formula import Bot, conj, disj, evaluate, ge, substitute
from .presburger.terms import LinearTerm
from .presburger.qe import is_satisfiable
from .rectilinear import rectilinearize
from .ring import FixedQ


def at_parameters(f: ConstructibleFunction, s: Sequence[int]) -> ConstructibleFunction:
    """``f(s, .)`` as a function of the lattice variables alone."""
    env = dict(zip(f.params, s))
    terms = []
    for t in f.terms:
        sup = substitute(t.support, env)
        if isinstance(sup, Bot):
            continue
        terms.append(replace(t, support=sup, exponent=t.exponent.substitute(env),
                             factor=t.factor.substitute(env),
                             poles=tuple(g.substitute(env) for g in t.poles)))
    return ConstructibleFunction((), f.lattice, tuple(terms), substitute(f.domain, env), f.mode)


def partial_sum(f: ConstructibleFunction, s: Sequence[int], q: FixedQ, N: int,
                lo: int = 0) -> Fraction:
    """``sum f(s, y)`` over ``y in [lo, lo + N)^m`` (points of the domain)."""
    g = at_parameters(f, s)
    total = Fraction(0)
    for y in product(range(lo, lo + N), repeat=len(f.lattice)):
        env = dict(zip(g.lattice, y))
        if evaluate(g.domain, env):
            total += g._value(env, q)
    return total


def _series(a: int, x: Fraction) -> Fraction:
    """``sum_{t>=0} t^a x^t`` for ``0 <= x < 1``, by the derivative recursion."""
    # S_a = sum_j S(a, j) j! x^j / (1 - x)^(j+1) with Stirling numbers
    total = Fraction(0)
    for j in range(a + 1):
        total += _stirling2(a, j) * _fact(j) * x ** j / (1 - x) ** (j + 1)
    return total


def _fact(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


def _tail(a: int, x: Fraction, N: int) -> Fraction:
    """``sum_{t>=N} t^a x^t = x^N sum_j C(a,j) N^(a-j) S_j(x)``."""
    return x ** N * sum(comb(a, j) * N ** (a - j) * _series(j, x) for j in range(a + 1))


def tail_bound(f: ConstructibleFunction, s: Sequence[int], q: FixedQ, N: int) -> Fraction | None:
    """Exact majorant of ``sum |f(s, y)|`` over ``N^m`` minus ``[0, N)^m``.

    A coordinate that the term's support confines to ``[0, N)`` contributes
    no tail (and any slope is fine there); every other coordinate needs a
    decaying slope.  ``None`` when some monomial does not decay or a support
    leaves ``N^m``."""
    g = at_parameters(f, s)
    ys = g.lattice
    bound = Fraction(0)
    for t in g.terms:
        region = conj(g.domain, t.support)
        if not is_satisfiable(region):
            continue
        c = abs(q.coerce(t.coeff))
        for pole in t.poles:
            c *= abs(q.pole(int(pole.constant_term())))
        slopes, confined = [], []
        for y in ys:
            yv = LinearTerm.var(y)
            if is_satisfiable(conj(region, ge(-yv - 1))):
                return None
            confined.append(not is_satisfiable(conj(region, ge(yv - N))))
            cs = t.exponent.coefficients_in(y)
            b = cs.get(1, Poly())
            if any(k > 1 for k in cs) or not b.is_constant():
                return None
            slopes.append(Fraction(b.constant_term()))
        e0 = t.exponent.substitute({y: 0 for y in ys})
        if not e0.is_constant():
            return None
        c *= q.L_power(e0.constant_term())
        xs = [q.q ** int(b) for b in slopes]
        if any(x >= 1 and not conf for x, conf in zip(xs, confined)):
            # joint decay: region => exp - e0 <= -(sum of free y)/k for some k
            xs = _joint_decay(t.exponent, e0, region, ys, confined, q)
            if xs is None:
                return None
        for a, pa in t.factor.coefficient_split(ys).items():
            coef = abs(Fraction(pa.constant_term())) * c
            full = [sum(Fraction(k) ** ai * x ** k for k in range(N)) if conf else _series(ai, x)
                    for ai, x, conf in zip(a, xs, confined)]
            tails = [Fraction(0) if conf else _tail(ai, x, N) for ai, x, conf in zip(a, xs, confined)]
            acc = Fraction(0)
            for j in range(len(ys)):
                prod_ = tails[j]
                for i in range(len(ys)):
                    if i != j:
                        prod_ *= full[i]
                acc += prod_
            bound += coef * acc
    return bound


def _root_below(q: Fraction, k: int) -> Fraction:
    """A rational ``r > 1`` with ``r^k <= q``."""
    lo, hi = Fraction(1), Fraction(q)
    for _ in range(40):
        mid = (lo + hi) / 2
        if mid ** k <= q:
            lo = mid
        else:
            hi = mid
        lo = Fraction(lo).limit_denominator(10 ** 6) if lo.denominator > 10 ** 6 else lo
        if lo ** k > q:
            lo = Fraction(1)
    return lo


def _joint_decay(exponent: Poly, e0, region, ys, confined, q: FixedQ) -> list[Fraction] | None:
    from .presburger.qe import is_valid
    from .presburger.formula import implies
    if not exponent.is_affine():
        return None
    free = [y for y, conf in zip(ys, confined) if not conf]
    lin = exponent.to_linear()
    for k in range(1, 5):
        rhs = LinearTerm.make([(y, 1) for y in free])
        # k*(e - e0) + sum(free) <= 0
        cond = ge(-(lin * k - LinearTerm.constant(Fraction(e0.constant_term()) * k) + rhs))
        if is_valid(implies(region, cond)):
            r = _root_below(q.q, k)
            if r <= 1:
                return None
            # confined coordinates keep ratio 1 (their range is finite)
            return [Fraction(1) if conf else 1 / r for conf in confined]
    return None


def running_max(f: ConstructibleFunction, s: Sequence[int], q: FixedQ, ys: Sequence[Sequence[int]]) -> Fraction:
    g = at_parameters(f, s)
    best = Fraction(0)
    for y in ys:
        env = dict(zip(g.lattice, y))
        if evaluate(g.domain, env):
            best = max(best, abs(g._value(env, q)))
    return best


def monomial_verdicts(f: ConstructibleFunction, s: Sequence[int], q: FixedQ | None = None) -> dict[str, bool]:
    """Loci membership of ``s`` from merged monomials of ``f(s, .)``.

    On every rectilinear piece ``f(s, lambda, x) = sum c_i(lambda) x^a_i
    L^(b_i . x)``; summable iff every monomial with some nonzero ``c_i``
    has all ``b_ij < 0``, bounded iff all ``b_ij <= 0`` with ``a_ij = 0``
    where ``b_ij = 0``, identically zero iff every ``c_i`` vanishes on the
    finite set ``Lambda_s``.  Zero tests are formal unless ``q`` is given.
    """
    g = at_parameters(f, s)
    if q is not None:
        g = g.specialize(q) if not isinstance(g.mode, FixedQ) else g
    union = conj(g.domain, disj(*(t.support for t in g.terms)))
    out = {"integrability": True, "boundedness": True, "vanishing": True}
    if isinstance(union, Bot) or not g.terms or not is_satisfiable(union):
        return out
    markers = [conj(g.domain, t.support) for t in g.terms]
    for piece in rectilinearize(union, g.lattice, (), markers):
        form = merge_monomials(g, piece)
        lam_vars = [z for z, _ in piece.bounded]
        lam_points = list(_enumerate_bounded(piece))
        for mono in form.monomials:
            nonzero = any(not _is_zero(mono.coeff._value(dict(zip(lam_vars, lam)), mono.coeff.mode))
                          for lam in lam_points)
            if not nonzero:
                continue
            out["vanishing"] = False
            if any(b >= 0 for b in mono.b):
                out["integrability"] = False
            if any(b > 0 or (b == 0 and a > 0) for a, b in zip(mono.a, mono.b)):
                out["boundedness"] = False
    return out


def _is_zero(v) -> bool:
    return v == 0 if isinstance(v, Fraction) else v.is_zero()


def _enumerate_bounded(piece):
    """Points of ``Lambda`` (parameters already substituted)."""
    env: dict[str, int] = {}
    names = [z for z, _ in piece.bounded]
    guard = piece.bounded_part()

    def rec(i):
        if i == len(piece.bounded):
            if evaluate(guard, env):
                yield tuple(env[z] for z in names)
            return
        z, w = piece.bounded[i]
        hi = w.evaluate(env)
        if Fraction(hi).denominator != 1:
            return
        for v in range(0, int(hi) + 1):
            env[z] = v
            yield from rec(i + 1)
        env.pop(z, None)

    if not evaluate(piece.param_guard, {}):
        return
    yield from rec(0)


def grid_evaluate(f, env: dict, windows: dict | None = None):
    """Truth values of ``f`` on a whole grid at once.

    ``env`` maps free variables to broadcastable integer arrays.  Quantified
    variables range over ``center(env) + [-radius, radius]`` with
    ``windows[var] = (center, radius)``, ``center`` a :class:`LinearTerm`.
    """
    import numpy as np
    from .presburger.formula import And, Bot, Dvd, Exists, Forall, Ge, Not, Or, Top

    windows = windows or {}

    def lin(t, env):
        den = t.denominator()
        acc = np.asarray(int(t.const * den))
        for v, c in t.coeffs:
            acc = acc + int(c * den) * env[v]
        return acc, den

    def go(g, env):
        if isinstance(g, Top):
            return np.asarray(True)
        if isinstance(g, Bot):
            return np.asarray(False)
        if isinstance(g, Ge):
            return lin(g.term, env)[0] >= 0
        if isinstance(g, Dvd):
            val, den = lin(g.term, env)
            return val % (g.modulus * den) == 0
        if isinstance(g, Not):
            return ~go(g.arg, env)
        if isinstance(g, (And, Or)):
            parts = [go(a, env) for a in g.args]
            out = parts[0]
            for part in parts[1:]:
                out = (out & part) if isinstance(g, And) else (out | part)
            return out
        if isinstance(g, (Exists, Forall)):
            if g.var not in windows:
                raise ValueError(f"no window for quantified variable {g.var!r}")
            center, radius = windows[g.var]
            inner = {k: np.asarray(v)[..., None] for k, v in env.items()}
            c, den = lin(center, env)
            if den != 1:
                raise ValueError("window centers must be integral")
            inner[g.var] = np.asarray(c)[..., None] + np.arange(-radius, radius + 1)
            shape = np.broadcast_shapes(*(a.shape for a in inner.values()))
            body = np.broadcast_to(go(g.body, inner), shape)
            return body.any(axis=-1) if isinstance(g, Exists) else body.all(axis=-1)
        raise TypeError(f"unexpected formula node {type(g).__name__}")

    return go(f, {k: np.asarray(v) for k, v in env.items()})


def grid_partial_sum(f: ConstructibleFunction, q: FixedQ, N: int,
                     s: Sequence[int] = ()) -> Fraction:
    """Same as :func:`partial_sum` (``lo = 0``) but vectorized: supports are
    evaluated on the whole box at once and values grouped by exponent, so
    the result is still exact."""
    import numpy as np

    g = at_parameters(f, s)
    ys = g.lattice
    axes = np.meshgrid(*(np.arange(N, dtype=np.int64) for _ in ys), indexing="ij")
    env = dict(zip(ys, axes))
    dom = np.broadcast_to(grid_evaluate(g.domain, env), axes[0].shape)
    total = Fraction(0)
    for t in g.terms:
        mask = dom & np.broadcast_to(grid_evaluate(t.support, env), axes[0].shape)
        if not mask.any():
            continue
        c = q.coerce(t.coeff)
        for pole in t.poles:
            if not pole.is_constant():
                raise ValueError("pole exponents must not depend on the lattice")
            c *= q.pole(int(pole.constant_term()))
        if not t.exponent.is_affine():
            raise ValueError(f"exponent {t.exponent} is not affine")
        lin = t.exponent.to_linear()
        if lin.denominator() != 1:
            raise ValueError(f"exponent {t.exponent} is not integral")
        expo = np.full(axes[0].shape, int(lin.const), dtype=np.int64)
        for v, a in lin.coeffs:
            expo = expo + int(a) * env[v]
        d = t.factor.denominator()
        fac = np.zeros(axes[0].shape, dtype=object)
        for mono, a in t.factor.terms:
            val = np.full(axes[0].shape, int(Fraction(a) * d), dtype=object)
            for v, e in mono:
                val = val * env[v].astype(object) ** e
            fac = fac + val
        es, inv = np.unique(expo[mask], return_inverse=True)
        sums = [0] * len(es)
        for i, v in zip(inv.ravel(), fac[mask].ravel()):
            sums[i] += int(v)
        for e, tot in zip(es, sums):
            if tot:
                total += c * q.L_power(int(e)) * Fraction(tot, d)
    return total
