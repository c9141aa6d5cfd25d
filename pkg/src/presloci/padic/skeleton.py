"""Skeleton-factored integrands on K^m and their exact reduction to lattice
sums over the valuation vector ``r = (ord x_1, ..., ord x_m)``."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from ..constructible import ConstructibleFunction, Term
from ..engine import LocusResult, SumResult, compute_locus, sum_over_lattice, _in_mode
from ..poly import Poly
from ..presburger.formula import TRUE, Bot, Formula, conj, disj, fresh_name, ge, neg
from ..presburger.terms import LinearTerm
from ..ring import FORMAL, Mode

PADIC_KINDS = ("integrability", "boundedness", "vanishing", "local-integrability", "local-boundedness")
_ALIASES = {"int": "integrability", "bdd": "boundedness", "iva": "vanishing",
            "local-int": "local-integrability", "local-bdd": "local-boundedness"}


class UnsupportedIntegrand(ValueError):
    pass


@dataclass(frozen=True)
class CoordinateSpec:
    """One coordinate of a cell: ``zero`` (x_i = 0), or ``ord x_i = r_i``
    with no angular condition (``ac is None``) or with the first digit in
    the explicit tuple ``ac``."""

    zero: bool = False
    ac: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.zero and self.ac is not None:
            raise ValueError("a zero coordinate carries no angular condition")
        if self.ac is not None:
            if not self.ac or len(set(self.ac)) != len(self.ac):
                raise ValueError("angular values must be a nonempty list of distinct residues")
            if any(a <= 0 for a in self.ac):
                raise ValueError("angular values must be positive residues (units for every prime)")

    def to_json(self):
        if self.zero:
            return {"zero": True}
        return {"ac": "all" if self.ac is None else list(self.ac)}


@dataclass(frozen=True)
class SkeletonCell:
    valuation: Formula                      # over params + rvars
    coords: tuple[CoordinateSpec, ...]

    @property
    def null(self) -> bool:
        return any(c.zero for c in self.coords)

    def to_json(self):
        return {"valuation": str(self.valuation), "coords": [c.to_json() for c in self.coords]}


@dataclass(frozen=True)
class Phase:
    """``x -> u * p^v * prod x_j^e_j``."""

    unit: int
    pexp: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        if self.unit == 0:
            raise ValueError("phase coefficient must be nonzero")
        if any(e < 0 for e in self.exponents):
            raise ValueError("phase exponents must be nonnegative")

    def negated(self) -> "Phase":
        return Phase(-self.unit, self.pexp, self.exponents)

    def __str__(self) -> str:
        mono = " * ".join(f"x{i + 1}^{e}" for i, e in enumerate(self.exponents) if e)
        return f"{self.unit} * p^{self.pexp}" + (f" * {mono}" if mono else "")


@dataclass(frozen=True)
class SkeletonIntegrand:
    """``f(x) = 1_cells(x) * F(s, ord x) * (sum_i g_i(s, ord x) psi(h_i(x)))``,
    the bracket being 1 when there is no oscillation."""

    params: tuple[str, ...]
    rvars: tuple[str, ...]
    cells: tuple[SkeletonCell, ...]
    amplitude: ConstructibleFunction
    oscillation: tuple[tuple[Phase, ConstructibleFunction], ...] = ()

    def __post_init__(self):
        if self.amplitude.params != self.params or self.amplitude.lattice != self.rvars:
            raise ValueError("amplitude must be a function of (params; rvars)")
        for c in self.cells:
            if len(c.coords) != len(self.rvars):
                raise ValueError("every cell needs one coordinate spec per variable")
        for ph, g in self.oscillation:
            if len(ph.exponents) != len(self.rvars):
                raise ValueError("phase exponent vector has the wrong length")
            if g.params != self.params or g.lattice != self.rvars:
                raise ValueError("phase weights must be functions of (params; rvars)")

    @property
    def dim(self) -> int:
        return len(self.rvars)

    @property
    def mode(self) -> Mode:
        return self.amplitude.mode


def fiber_volume(cell: SkeletonCell, rvars: Sequence[str], params: Sequence[str] = (),
                 mode: Mode = FORMAL) -> tuple[ConstructibleFunction, bool]:
    """Haar volume of ``{x : ord x = r, ac conditions}`` as a function of
    ``r``, with a flag telling whether the cell is null (some ``x_i = 0``)."""
    if cell.null:
        return ConstructibleFunction.zero(params, rvars, TRUE, mode), True
    c = mode.one()
    exp = Poly()
    for r, spec in zip(rvars, cell.coords):
        if spec.ac is None:
            c = c * (mode.one() - mode.L_power(-1))
            exp = exp - Poly.var(r)
        else:
            c = c * len(spec.ac)
            exp = exp - Poly.var(r) - 1
    t = Term(c, TRUE, exp)
    return ConstructibleFunction(tuple(params), tuple(rvars), (t,), TRUE, mode).simplify(), False


@dataclass(frozen=True)
class Reduction:
    """Lattice data of an oscillation-free integrand: ``mass`` is the
    amplitude times fiber volumes (summed for integrals), ``values`` the
    amplitude on the union of non-null cells (for sup and vanishing)."""

    mass: ConstructibleFunction
    values: ConstructibleFunction

    def to_json(self) -> dict:
        return {"mass": self.mass.to_json(), "values": self.values.to_json()}

    def serialized(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def reduce_integrand(f: SkeletonIntegrand, mode: Mode | None = None) -> Reduction:
    if f.oscillation:
        raise UnsupportedIntegrand("oscillatory integrands have no exact reduction here")
    F = _in_mode(f.amplitude, mode)
    terms = []
    live = []
    for cell in f.cells:
        vol, null = fiber_volume(cell, f.rvars, f.params, F.mode)
        if null:
            continue
        live.append(cell.valuation)
        for a in F.terms:
            for v in vol.terms:
                sup = conj(a.support, cell.valuation, F.domain)
                if isinstance(sup, Bot):
                    continue
                terms.append(Term(a.coeff * v.coeff, sup, a.exponent + v.exponent, a.factor * v.factor, a.poles))
    mass = ConstructibleFunction(f.params, f.rvars, tuple(terms), TRUE, F.mode).simplify()
    values = F.restrict(disj(*live) if live else neg(TRUE)).with_domain(TRUE).simplify()
    return Reduction(mass, values)


def integrate_skeleton(f: SkeletonIntegrand, mode: Mode | None = None) -> SumResult:
    """Exact ``int_{K^m} f |dx|`` with its validity (integrability) locus."""
    return sum_over_lattice(reduce_integrand(f, mode).mass)


def _ball_truncation(F: ConstructibleFunction, nvar: str, punctured: bool = False) -> ConstructibleFunction:
    """``F`` restricted to ``ord x_i >= -N`` for all ``i``, with ``N`` as a
    new (last) lattice variable.  With ``punctured`` also ``ord x_i <= N``:
    these exhaust the compact subsets off the coordinate hyperplanes."""
    nv = LinearTerm.var(nvar)
    ball = conj(ge(nv), *(ge(LinearTerm.var(r) + nv) for r in F.lattice))
    if punctured:
        ball = conj(ball, *(ge(nv - LinearTerm.var(r)) for r in F.lattice))
    g = F.restrict(ball)
    return ConstructibleFunction(F.params + (nvar,), F.lattice, g.terms, F.domain, F.mode)


def locus_padic(f: SkeletonIntegrand, kind: str, mode: Mode | None = None,
                punctured: bool = False) -> LocusResult:
    """Locus witness over the parameters.  ``punctured`` applies to the local
    kinds only: local integrability (boundedness) on the complement of the
    coordinate hyperplanes instead of on all of ``K^m``."""
    kind = _ALIASES.get(kind, kind)
    if kind not in PADIC_KINDS:
        raise ValueError(f"unknown locus kind {kind!r}")
    red = reduce_integrand(f, mode)
    if kind == "integrability":
        return compute_locus(red.mass, "integrability")
    if kind == "boundedness":
        return compute_locus(red.values, "boundedness")
    if kind == "vanishing":
        return compute_locus(red.values, "vanishing")
    # local kinds: integrable (bounded) on every ball p^-N O^m, i.e. the
    # witness h(s, N) of the truncated function vanishes for all N >= 0
    base = red.mass if kind == "local-integrability" else red.values
    nvar = fresh_name("N", set(base.variables))
    trunc = _ball_truncation(base, nvar, punctured)
    h = compute_locus(trunc, "integrability" if kind == "local-integrability" else "boundedness").witness
    hN = ConstructibleFunction(f.params, (nvar,), h.terms, TRUE, h.mode).restrict(ge(LinearTerm.var(nvar)))
    res = compute_locus(hN, "vanishing")
    return LocusResult(kind, res.witness, res.mode)


def conjugate_oscillation(f: SkeletonIntegrand) -> SkeletonIntegrand:
    """Complex conjugate of ``f`` (amplitudes are real): negate every phase."""
    return SkeletonIntegrand(f.params, f.rvars, f.cells, f.amplitude,
                             tuple((ph.negated(), g) for ph, g in f.oscillation))
