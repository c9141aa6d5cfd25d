"""Parametric rectilinearization of Presburger sets.

The basic step, :func:`slice_1d`, cuts a set ``X(rest, y)`` along one
variable: congruences on ``y`` are removed by ``y = N*w + r``, the remaining
``y``-atoms are decided by Shannon expansion, and in every leaf the largest
lower bound and smallest upper bound are selected by case split (residue
guards make the rounded bounds affine).  Each slice is a guard on the other
variables together with an affine parametrisation ``y = offset + step*t``
where ``t`` ranges over ``[0, width]`` or over ``N``.

:func:`rectilinearize` applies the step recursively to obtain pieces whose
fibers are ``Lambda_s x N^l``; orders in which a bounded coordinate would
depend on an unbounded one are rejected and another variable is tried.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd, lcm
from typing import Sequence

from .presburger.formula import (
    FALSE, TRUE, Bot, Dvd, Formula, Ge, atoms, conj, dvd,
    free_variables, fresh_name, ge, map_atoms, neg, nnf, substitute,
)
from .presburger.qe import is_satisfiable, tidy
from .presburger.terms import LinearTerm


class RectilinearizationError(ValueError):
    """No variable order gives product-shaped fibers for this set."""


@dataclass(frozen=True)
class Slice:
    guard: Formula                    # over the other variables
    offset: LinearTerm                # y = offset + step * t
    step: int
    width: LinearTerm | None          # t in [0, width], or t in N when None
    cell: Formula                     # the slice as a set in (other variables, y)
    markers: tuple[Formula, ...]      # markers with their y-dependence decided


def _y_moduli(f: Formula, y: str) -> int:
    n = 1
    for a in atoms(f):
        if isinstance(a, Dvd):
            c = a.term.coeff(y)
            if c:
                n = lcm(n, a.modulus // gcd(a.modulus, abs(c)))
    return n


def _decide(f: Formula, atom: Formula, value: bool) -> Formula:
    repl = TRUE if value else FALSE
    return map_atoms(f, lambda a: repl if a == atom else a)


def _ceil_floor_cases(lits: list[Ge], w: str):
    """Yield ``(guard, lowers, uppers)`` with affine integer bounds for ``w``."""
    lows, ups = [], []
    for a in lits:
        c = a.term.coeff(w)
        t = a.term.drop(w)
        if c > 0:
            lows.append((c, t))          # c*w + t >= 0 -> w >= ceil(-t/c)
        else:
            ups.append((-c, t))          # -c*w + t >= 0 -> w <= floor(t/c)
    bounds = lows + ups
    need_idx = [i for i, (c, _) in enumerate(bounds) if c > 1]
    for residues in product(*(range(bounds[i][0]) for i in need_idx)):
        guard = conj(*(dvd(bounds[i][0], bounds[i][1] - r) for i, r in zip(need_idx, residues)))
        if isinstance(guard, Bot):
            continue
        res = dict(zip(need_idx, residues))
        L = [(-t + res[i]) / c if c > 1 else -t for i, (c, t) in enumerate(lows)]
        U = [(t - res[len(lows) + i]) / c if c > 1 else t for i, (c, t) in enumerate(ups)]
        yield guard, L, U


def _extremal(terms: list[LinearTerm], largest: bool):
    """Yield ``(guard, chosen)`` over which term is the max (min) with ties
    broken towards the first index."""
    if len(terms) == 1:
        yield TRUE, terms[0]
        return
    for i, t in enumerate(terms):
        conds = []
        for k, o in enumerate(terms):
            if k == i:
                continue
            d = (t - o) if largest else (o - t)
            conds.append(ge(d - 1) if k < i else ge(d))
        yield conj(*conds), t


def slice_1d(x: Formula, y: str, markers: Sequence[Formula] = (),
             check: bool = True) -> list[Slice]:
    """Decompose ``x`` (quantifier-free) along ``y``; see module docstring."""
    x = nnf(x)
    markers = [nnf(m) for m in markers]
    taken = set(free_variables(x)).union(*(free_variables(m) for m in markers))
    w = fresh_name("w", taken | {y})
    # per formula: a conjunction could collapse to false and hide its atoms
    N = lcm(*(_y_moduli(g, y) for g in [x, *markers]))
    out: list[Slice] = []
    for r in range(N):
        sub = {y: LinearTerm.var(w, N) + r}
        xr = substitute(x, sub)
        mr = [substitute(m, sub) for m in markers]
        if isinstance(xr, Bot):
            continue
        ge_atoms: dict[Formula, None] = {}
        for f in [xr, *mr]:
            for a in atoms(f):
                if isinstance(a, Ge) and a.term.coeff(w):
                    ge_atoms.setdefault(a)
        for lits, guard0, reduced in _shannon(xr, mr, list(ge_atoms)):
            for rguard, L, U in _ceil_floor_cases(lits, w):
                base = conj(guard0, rguard)
                if isinstance(base, Bot):
                    continue
                for gl, lo in (_extremal(L, True) if L else [(TRUE, None)]):
                    for gu, up in (_extremal(U, False) if U else [(TRUE, None)]):
                        g = conj(base, gl, gu)
                        if lo is not None and up is not None:
                            g = conj(g, ge(up - lo))
                            pieces = [(lo * N + r, N, up - lo)]
                        elif lo is not None:
                            pieces = [(lo * N + r, N, None)]
                        elif up is not None:
                            pieces = [(up * N + r, -N, None)]
                        else:
                            pieces = [(LinearTerm.constant(r), N, None),
                                      (LinearTerm.constant(r - N), -N, None)]
                        for off, step, width in pieces:
                            yv = LinearTerm.var(y)
                            bounds = [ge((yv - off) * (1 if step > 0 else -1))]
                            if width is not None:
                                bounds.append(ge(off + width * step - yv))
                            cell = conj(g, dvd(N, yv - r), *bounds)
                            s = _finish(g, off, step, width, cell, reduced, (y, w), check)
                            if s is not None:
                                out.append(s)
    return out


def _finish(guard, off, step, width, cell, markers, cut, check) -> Slice | None:
    if isinstance(guard, Bot):
        return None
    if check and not is_satisfiable(guard):
        return None
    guard = tidy(guard) if check else guard
    if any(v in free_variables(g) for v in cut for g in (guard, *markers)):
        raise AssertionError("slice guard still mentions the sliced variable")
    return Slice(guard, off, step, width, cell, tuple(markers))


def _shannon(x: Formula, markers: list[Formula], ge_atoms: list[Formula]):
    """Leaves ``(literals, x reduced, markers reduced)`` of the expansion of
    ``x`` on ``ge_atoms`` (all atoms mentioning the cut variable)."""
    def rec(i: int, xf: Formula, ms: list[Formula], lits: list[Ge]):
        if isinstance(xf, Bot):
            return
        if i == len(ge_atoms):
            yield lits, xf, ms
            return
        a = ge_atoms[i]
        for val in (True, False):
            lit = a if val else neg(a)
            if isinstance(conj(*lits, lit), Bot):
                continue
            yield from rec(i + 1, _decide(xf, a, val), [_decide(m, a, val) for m in ms], lits + [lit])

    yield from rec(0, x, markers, [])


# ---------------------------------------------------------------------------
# m-dimensional pieces


@dataclass(frozen=True)
class RectilinearPiece:
    """A piece ``A`` of ``X`` with an affine bijection onto ``Lambda_s x N^l``.

    ``inverse[i]`` writes ``lattice[i]`` in terms of the parameters and the
    target coordinates ``zvars``; ``forward[i]`` writes ``zvars[i]`` in terms
    of the parameters and the lattice variables.  ``bounded`` lists the
    coordinates of ``Lambda_s`` with their upper bounds ``0 <= z <= W``.
    """

    params: tuple[str, ...]
    lattice: tuple[str, ...]
    zvars: tuple[str, ...]
    source: Formula
    param_guard: Formula
    forward: tuple[LinearTerm, ...]
    inverse: tuple[LinearTerm, ...]
    bounded: tuple[tuple[str, LinearTerm], ...]
    unbounded: tuple[str, ...]
    markers: tuple[Formula, ...] = ()

    @property
    def shape_l(self) -> int:
        return len(self.unbounded)

    def bounded_part(self) -> Formula:
        return conj(self.param_guard, *(conj(ge(LinearTerm.var(z)), ge(w - LinearTerm.var(z)))
                                        for z, w in self.bounded))

    def target(self) -> Formula:
        return conj(self.bounded_part(), *(ge(LinearTerm.var(z)) for z in self.unbounded))

    def matrix(self) -> list[list[Fraction]]:
        return [[Fraction(t.coeff(y)) for y in self.lattice] for t in self.forward]

    def offset(self) -> tuple[LinearTerm, ...]:
        return tuple(LinearTerm.make([(v, c) for v, c in t.coeffs if v not in self.lattice], t.const)
                     for t in self.forward)

    def to_json(self) -> dict:
        fr = lambda c: str(c)
        return {
            "params": list(self.params),
            "lattice": list(self.lattice),
            "target_vars": list(self.zvars),
            "source": str(self.source),
            "matrix": [[fr(c) for c in row] for row in self.matrix()],
            "offset": [str(t) for t in self.offset()],
            "inverse": [str(t) for t in self.inverse],
            "shape_l": self.shape_l,
            "bounded_part": str(self.bounded_part()),
            "target": str(self.target()),
        }


@dataclass
class _Partial:
    guard: Formula
    markers: tuple[Formula, ...]
    levels: list[tuple[str, Slice]] = field(default_factory=list)


def _target_name(y: str, taken: set[str]) -> str:
    return fresh_name(f"z_{y}", taken)


def rectilinearize(x: Formula, lattice: Sequence[str], params: Sequence[str] = (),
                   markers: Sequence[Formula] = ()) -> list[RectilinearPiece]:
    """Partition ``x`` (quantifier-free, over ``params + lattice``) into
    rectilinear pieces.  Each marker formula is decided on every piece; its
    residual dependence on the parameters is reported in ``piece.markers``."""
    lattice = tuple(lattice)
    params = tuple(params)
    taken = set(lattice) | set(params) | set(free_variables(x))
    zname = {y: _target_name(y, taken) for y in lattice}
    out: list[RectilinearPiece] = []
    for part in _rect(x, list(lattice), tuple(markers), zname):
        out.append(_assemble(part, lattice, params, zname))
    return out


def _rect(x: Formula, ys: list[str], markers: tuple[Formula, ...], zname,
          splits: int = 2) -> list[_Partial]:
    if not ys:
        return [_Partial(x, markers, [])]
    errors = []
    # preference: the last variable first, then earlier ones
    for y in reversed(ys):
        rest = [v for v in ys if v != y]
        try:
            parts: list[_Partial] = []
            for sl in slice_1d(x, y, markers):
                for sub in _rect(sl.guard, rest, sl.markers, zname, splits):
                    if sl.width is not None:
                        _check_width(sl.width, sub, zname)
                    parts.append(_Partial(sub.guard, sub.markers, sub.levels + [(y, sl)]))
            return parts
        except RectilinearizationError as e:
            errors.append(str(e))
    # different cells may need different orders: cut x into the (disjoint)
    # cells of one slicing and treat each cell on its own
    if splits > 0 and len(ys) > 1:
        for y in reversed(ys):
            cells = slice_1d(x, y, markers)
            if len(cells) < 2:
                continue
            try:
                return [p for sl in cells for p in _rect(sl.cell, ys, markers, zname, splits - 1)]
            except RectilinearizationError as e:
                errors.append(str(e))
    raise RectilinearizationError(
        f"no elimination order over {ys} yields product-shaped fibers ({'; '.join(errors)})")


def _inverse_map(levels: list[tuple[str, Slice]], zname) -> dict[str, LinearTerm]:
    inv: dict[str, LinearTerm] = {}
    for y, sl in levels:
        off = sl.offset.substitute(inv)
        inv[y] = off + LinearTerm.var(zname[y], sl.step)
    return inv


def _check_width(width: LinearTerm, sub: _Partial, zname) -> None:
    inv = _inverse_map(sub.levels, zname)
    w = width.substitute(inv)
    unbounded = {zname[y] for y, sl in sub.levels if sl.width is None}
    bad = [v for v in w.variables if v in unbounded]
    if bad:
        raise RectilinearizationError(f"bounded width {width} depends on unbounded {', '.join(bad)}")


def _assemble(part: _Partial, lattice, params, zname) -> RectilinearPiece:
    inv = _inverse_map(part.levels, zname)
    fwd: dict[str, LinearTerm] = {}
    for y, sl in part.levels:
        fwd[zname[y]] = (LinearTerm.var(y) - sl.offset) / sl.step
    bounded = []
    unbounded = []
    for y, sl in part.levels:
        if sl.width is None:
            unbounded.append(zname[y])
        else:
            bounded.append((zname[y], sl.width.substitute(inv)))
    source = conj(part.guard, *(sl.cell for _, sl in part.levels))
    return RectilinearPiece(
        params=tuple(params), lattice=tuple(lattice), zvars=tuple(zname[y] for y in lattice),
        source=source, param_guard=part.guard,
        forward=tuple(fwd[zname[y]] for y in lattice),
        inverse=tuple(inv[y] for y in lattice),
        bounded=tuple(bounded), unbounded=tuple(unbounded), markers=part.markers)
