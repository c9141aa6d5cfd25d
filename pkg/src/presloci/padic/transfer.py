"""Cross-backend transfer harness: symbolic reductions, numeric verdicts
for Q_p and F_p((t)), and the symbolic locus at ``L = p``."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from ..engine import LocusResult
from ..ring import FixedQ
from .numeric import LocalFieldBackend, numeric_integrate, shell_verdict
from .skeleton import SkeletonIntegrand, locus_padic, reduce_integrand

BACKENDS = ("qp", "fpt")
_KINDS = {"int": "integrability", "bdd": "boundedness", "iva": "vanishing"}


@dataclass
class TransferReport:
    structural: dict[str, bool] = field(default_factory=dict)      # per prime
    verdicts: list[dict] = field(default_factory=list)
    counterexamples: list[dict] = field(default_factory=list)
    oscillatory: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples and all(self.structural.values())

    def to_json(self) -> dict:
        return {"ok": self.ok, "structural": {str(k): v for k, v in self.structural.items()},
                "verdicts": self.verdicts, "oscillatory": self.oscillatory,
                "counterexamples": self.counterexamples}


def _numeric_verdict(f: SkeletonIntegrand, kind: str, backend: LocalFieldBackend, s) -> bool:
    res, mass, sup = numeric_integrate(f, backend, s, shells=True)
    # aggregate per "height" max(|r_i|) so divergence towards 0 or infinity shows up
    if kind == "vanishing":
        return all(v < 1e-12 for v in sup.values())
    by_height: dict[int, float] = {}
    src = mass if kind == "integrability" else sup
    for r, v in src.items():
        if max(r) == backend.depth - backend.offset:
            continue                                  # the deep ball is not a shell
        h = max(max(r), -min(r))
        val = abs(v)
        if kind == "integrability":
            by_height[h] = by_height.get(h, 0.0) + val
        else:
            by_height[h] = max(by_height.get(h, 0.0), val)
    deep = backend.depth - backend.offset
    seq = [by_height.get(h, 0.0) for h in range(max(backend.offset, deep - 1) + 1)]
    if kind == "integrability":
        return shell_verdict(seq)
    # bounded: the sup over the outer shells does not grow
    tail = [v for v in seq[len(seq) // 2:] if v > 0]
    return len(tail) < 2 or max(b / a for a, b in zip(tail, tail[1:])) <= 1.0 + 1e-9


def transfer_check(f: SkeletonIntegrand, kinds: Sequence[str], primes: Sequence[int],
                   box: Sequence[Sequence[int]], depth: int = 24, offset: int = 4) -> TransferReport:
    rep = TransferReport()
    kinds = [_KINDS.get(k, k) for k in kinds]
    for p in primes:
        if f.oscillation:
            rep.structural[p] = True
        else:
            blobs = {b: reduce_integrand(f).serialized() for b in BACKENDS}
            rep.structural[p] = len(set(blobs.values())) == 1
        be = {b: LocalFieldBackend(b, p, depth, offset) for b in BACKENDS}
        if f.oscillation:
            for s in product(*box):
                vals = {b: numeric_integrate(f, be[b], s).value for b in BACKENDS}
                diff = abs(vals["qp"] - vals["fpt"])
                row = {"p": p, "s": list(s), "qp": [vals["qp"].real, vals["qp"].imag],
                       "fpt": [vals["fpt"].real, vals["fpt"].imag], "agree": diff <= 1e-6}
                rep.oscillatory.append(row)
                if diff > 1e-6:
                    rep.counterexamples.append(dict(row, reason="numeric values differ"))
            continue
        for kind in kinds:
            loc: LocusResult = locus_padic(f, kind)
            for s in product(*box):
                sym = loc.contains(s, FixedQ(p))
                num = {b: _numeric_verdict(f, kind, be[b], s) for b in BACKENDS}
                row = {"p": p, "kind": kind, "s": list(s), "symbolic": sym, **num}
                rep.verdicts.append(row)
                if not (num["qp"] == num["fpt"] == sym):
                    rep.counterexamples.append(dict(row, reason="verdicts differ"))
    return rep
