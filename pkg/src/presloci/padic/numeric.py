"""Riemann sums over residue classes for Q_p and F_p((t)).

Each coordinate ranges over the shells ``ord x = r`` for ``-e <= r < k - e``
plus the deep ball ``ord x >= k - e``.  A shell is cut into the residue
classes ``p^r * u`` with ``u`` a unit known to ``d`` digits, where ``d`` is
just large enough for every phase ``psi(h(x))`` to be constant on the class
(``d = 1`` without oscillation, which also fixes the angular component).
The deep ball is one class with representative ``p^(k-e)``; its mass is
reported as the unresolved part of the error estimate.

Valuation and angular component are read off the digits and agree for the
two backends.  The characters differ: on Q_p ``psi(x) = exp(2 pi i {x/p})``
(fractional part), on F_p((t)) ``psi(x) = exp(2 pi i a_0 / p)`` with ``a_0``
the constant coefficient; both are trivial on the maximal ideal and
nontrivial on the integers.  Everything outside ``p^-e O^m`` is ignored.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from ..presburger.formula import evaluate
from ..ring import FixedQ
from .skeleton import Phase, SkeletonIntegrand

SUPPORTED_PRIMES = (2, 3, 5, 7, 11, 13)
DEFAULT_BUDGET = 2_000_000


class EnumerationBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class LocalFieldBackend:
    kind: str            # "qp" or "fpt"
    p: int
    depth: int           # number of enumerated shells per coordinate
    offset: int = 0      # e: the lowest enumerated valuation is -e

    def __post_init__(self):
        if self.kind not in ("qp", "fpt"):
            raise ValueError(f"unknown backend {self.kind!r}")
        if self.p not in SUPPORTED_PRIMES:
            raise ValueError(f"unsupported prime {self.p}")
        if self.depth < 1 or self.offset < 0:
            raise ValueError("depth must be >= 1 and offset >= 0")


@dataclass(frozen=True)
class NumericResult:
    value: complex
    error: float
    inconclusive: bool
    classes: int

    def to_json(self) -> dict:
        return {"re": float(self.value.real), "im": float(self.value.imag), "error": float(self.error),
                "inconclusive": bool(self.inconclusive), "classes": int(self.classes)}


def _units(p: int, d: int) -> np.ndarray:
    u = np.arange(p ** d, dtype=np.int64)
    return u[u % p != 0]


def _digits(u: np.ndarray, p: int, n: int) -> np.ndarray:
    return np.stack([(u // p ** i) % p for i in range(n)], axis=1) if n else np.zeros((len(u), 0), np.int64)


def _phase_valuation(ph: Phase, r: Sequence[int]) -> int:
    return ph.pexp + sum(e * rj for e, rj in zip(ph.exponents, r))


def _psi(kind: str, p: int, ph: Phase, r: Sequence[int], us: list[np.ndarray]) -> np.ndarray:
    """``psi(h(x))`` at ``x_j = p^r_j * u_j`` (arrays of equal length)."""
    n = len(us[0]) if us else 1
    need = 1 - _phase_valuation(ph, r)       # h = U * p^(need-1)... psi trivial when need <= 0
    if need <= 0:
        return np.ones(n, dtype=complex)
    if kind == "qp":
        mod = p ** need
        acc = np.full(n, ph.unit % mod, dtype=np.int64)
        for u, e in zip(us, ph.exponents):
            for _ in range(e):
                acc = (acc * (u % mod)) % mod
        return np.exp(2j * np.pi * acc / mod)
    # coefficient of t^(need-1) in U * prod u_j(t)^e_j over F_p
    poly = np.zeros((n, need), dtype=np.int64)
    poly[:, 0] = ph.unit % p
    for u, e in zip(us, ph.exponents):
        dj = _digits(u, p, need)
        for _ in range(e):
            out = np.zeros_like(poly)
            for i in range(need):
                out[:, i:] = (out[:, i:] + poly[:, i:i + 1] * dj[:, :need - i]) % p
            poly = out
    return np.exp(2j * np.pi * poly[:, need - 1] / p)


def _digits_needed(f: SkeletonIntegrand, r: Sequence[int], j: int) -> int:
    d = 1
    for ph, _ in f.oscillation:
        if ph.exponents[j]:
            d = max(d, 1 - _phase_valuation(ph, r))
    return d


def numeric_integrate(f: SkeletonIntegrand, backend: LocalFieldBackend, s: Sequence[int] = (),
                      budget: int = DEFAULT_BUDGET, tolerance: float = 1e-3,
                      shells: bool = False):
    """Riemann sum of ``f`` over ``p^-e O^m``.  With ``shells``, also return
    the contributions and sup norms per valuation vector."""
    p, k, e, m = backend.p, backend.depth, backend.offset, f.dim
    q = FixedQ(p)
    F = f.amplitude if isinstance(f.amplitude.mode, FixedQ) else f.amplitude.specialize(q)
    weights = [g if isinstance(g.mode, FixedQ) else g.specialize(q) for _, g in f.oscillation]
    penv = dict(zip(f.params, s))
    deep = k - e
    total = 0j
    unresolved = 0.0
    sup = 0.0
    classes = 0
    shell_mass: dict[tuple, complex] = {}
    shell_sup: dict[tuple, float] = {}
    for r in product(range(-e, deep + 1), repeat=m):
        env = dict(penv, **dict(zip(f.rvars, r)))
        cells = [c for c in f.cells if not c.null and evaluate(c.valuation, env)]
        is_deep = [rj == deep for rj in r]
        if not cells:
            continue
        amp = float(F._value(env, q)) if evaluate(F.domain, env) else 0.0
        ds = [1 if is_deep[j] else _digits_needed(f, r, j) for j in range(m)]
        per = [np.array([1], np.int64) if is_deep[j] else _units(p, ds[j]) for j in range(m)]
        count = int(np.prod([len(x) for x in per]))
        classes += count
        if classes > budget:
            raise EnumerationBudgetError(f"more than {budget} residue classes")
        grids = np.meshgrid(*per, indexing="ij")
        us = [g.ravel() for g in grids]
        inside = np.zeros(count, dtype=bool)
        for c in cells:
            hit = np.ones(count, dtype=bool)
            for j, spec in enumerate(c.coords):
                if spec.ac is not None:
                    units = [v % p for v in spec.ac]
                    if any(x == 0 for x in units):
                        raise ValueError(f"angular value not a unit mod {p}")
                    hit &= np.isin(us[j] % p, units)
            inside |= hit
        if not inside.any():
            continue
        measure = np.ones(count)
        for j in range(m):
            measure *= float(p) ** (-deep) if is_deep[j] else float(p) ** (-r[j] - ds[j])
        if f.oscillation:
            osc = np.zeros(count, dtype=complex)
            for (ph, _), g in zip(f.oscillation, weights):
                osc += float(g._value(env, q)) * _psi(backend.kind, p, ph, r, us)
            vals = amp * osc
        else:
            vals = np.full(count, amp, dtype=complex)
        vals = np.where(inside, vals, 0)
        contrib = complex((vals * measure).sum())
        local_sup = float(np.abs(vals).max())
        total += contrib
        if any(is_deep):
            unresolved += float((measure * inside).sum())
        shell_mass[r] = contrib
        shell_sup[r] = local_sup
        sup = max(sup, local_sup)
    err = unresolved * sup
    res = NumericResult(total, err, err > tolerance, classes)
    if shells:
        return res, shell_mass, shell_sup
    return res


def shell_verdict(values: Sequence[float], ratio: float = 0.9) -> bool:
    """Decay test on the outer half of a shell sequence: True when the
    nonzero values there decrease at least geometrically with the given
    ratio (or vanish).  A heuristic cross-check only."""
    tail = [abs(v) for v in values[len(values) // 2:]]
    pos = [v for v in tail if v > 1e-300]
    if len(pos) < 2:
        return True
    return max(b / a for a, b in zip(pos, pos[1:])) < ratio
