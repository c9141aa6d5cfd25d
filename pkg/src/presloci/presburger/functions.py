"""Piecewise-affine Presburger functions: representation, extraction from a
graph formula, and lexicographic definable choice."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .formula import (
    TRUE, Formula, conj, disj, dvd, eq, evaluate, exists, exists_many, forall,
    free_variables, fresh_name, ge, implies, lt, neg, substitute,
)
from .qe import cooper_data, eliminate_quantifiers, is_satisfiable, is_valid, simplify, tidy
from .terms import LinearTerm, Number


class NotAFunctionError(ValueError):
    pass


class NotTotalError(ValueError):
    pass


class FiberSizeError(ValueError):
    pass


class EmptyFiberError(ValueError):
    pass


@dataclass(frozen=True)
class PiecewiseAffineFunction:
    """Ordered ``(guard, values)`` pieces over named input variables.

    ``values`` holds one affine term (rational coefficients allowed) per
    output; on its guard each term takes integer values.  Guards are
    pairwise disjoint.
    """

    inputs: tuple[str, ...]
    pieces: tuple[tuple[Formula, tuple[LinearTerm, ...]], ...]

    @property
    def arity(self) -> int:
        return len(self.inputs)

    @property
    def out_arity(self) -> int:
        return len(self.pieces[0][1]) if self.pieces else 0

    @staticmethod
    def affine(inputs: Sequence[str], *values: LinearTerm, guard: Formula = TRUE) -> "PiecewiseAffineFunction":
        return PiecewiseAffineFunction(tuple(inputs), ((guard, tuple(values)),))

    @staticmethod
    def absolute(inputs: Sequence[str], t: LinearTerm) -> "PiecewiseAffineFunction":
        return PiecewiseAffineFunction(tuple(inputs), ((ge(t), (t,)), (neg(ge(t)), (-t,))))

    def domain(self) -> Formula:
        return disj(*(g for g, _ in self.pieces))

    def piece_at(self, point: Sequence[int] | Mapping[str, int]) -> int:
        env = point if isinstance(point, Mapping) else dict(zip(self.inputs, point))
        for i, (g, _) in enumerate(self.pieces):
            if evaluate(g, env):
                return i
        raise ValueError(f"point {dict(env)} outside the domain")

    def __call__(self, *point: int) -> tuple[Number, ...] | Number:
        env = dict(zip(self.inputs, point))
        vals = self.pieces[self.piece_at(env)][1]
        out = tuple(t.evaluate(env) for t in vals)
        return out[0] if len(out) == 1 else out

    def graph(self, outputs: Sequence[str]) -> Formula:
        parts = []
        for g, vals in self.pieces:
            parts.append(conj(g, *(eq(LinearTerm.var(o) - v) for o, v in zip(outputs, vals))))
        return disj(*parts)

    def __str__(self) -> str:
        rows = []
        for g, vals in self.pieces:
            vs = ", ".join(str(v) for v in vals)
            rows.append(f"{{{g}: {vs}}}")
        return "; ".join(rows)


def _integrality(t: LinearTerm) -> Formula:
    d = t.denominator()
    return dvd(d, t * d) if d > 1 else TRUE


def _candidates(y: str, body: Formula) -> list[LinearTerm]:
    data = cooper_data(y, body)
    out: dict[LinearTerm, None] = {}
    for j in range(1, data.delta + 1):
        for b in data.lower:
            out.setdefault((b + j) / data.scale)
    for j in range(1, data.delta + 1):
        for a in data.upper:
            out.setdefault((a - j) / data.scale)
    return list(out)


def _single_output(graph: Formula, inputs: Sequence[str], y: str) -> list[tuple[Formula, LinearTerm]]:
    body = eliminate_quantifiers(graph)
    remaining = TRUE
    pieces: list[tuple[Formula, LinearTerm]] = []
    for c in _candidates(y, body):
        g = simplify(conj(remaining, _integrality(c), substitute(body, {y: c})))
        if not is_satisfiable(g):
            continue
        pieces.append((g, c))
        remaining = conj(remaining, neg(g))
    # merge pieces carrying the same affine value
    merged: dict[LinearTerm, Formula] = {}
    for g, c in pieces:
        merged[c] = disj(merged[c], g) if c in merged else g
    return [(tidy(g), c) for c, g in merged.items()]


def extract_piecewise_affine(graph: Formula, in_arity: int, out_arity: int,
                             variables: Sequence[str] | None = None,
                             domain: Formula | None = None) -> PiecewiseAffineFunction:
    """Turn the graph of a Presburger function into guarded affine pieces.

    ``variables`` names the inputs followed by the outputs (default: free
    variables in order of occurrence).  The function must be total on
    ``domain`` (default: the projection of the graph).
    """
    names = tuple(variables) if variables is not None else free_variables(graph)
    if len(names) != in_arity + out_arity:
        raise ValueError(f"expected {in_arity + out_arity} variables, got {names}")
    inputs, outputs = names[:in_arity], names[in_arity:]
    taken = set(names) | set(free_variables(graph))
    # functionality: phi(x, y) and phi(x, y') -> y = y'
    primed = {o: fresh_name(o + "_", taken) for o in outputs}
    other = substitute(graph, {o: LinearTerm.var(p) for o, p in primed.items()})
    same = conj(*(eq(LinearTerm.var(o) - LinearTerm.var(primed[o])) for o in outputs))
    if not is_valid(implies(conj(graph, other), same)):
        raise NotAFunctionError("graph relates some input to two distinct outputs")
    proj = eliminate_quantifiers(exists_many(outputs, graph))
    if domain is not None and not is_valid(implies(domain, proj)):
        raise NotTotalError("function is not defined on the whole declared domain")
    per_output = []
    for o in outputs:
        g_o = exists_many([p for p in outputs if p != o], graph)
        per_output.append(_single_output(g_o, inputs, o))
    pieces: list[tuple[Formula, tuple[LinearTerm, ...]]] = [(TRUE, ())]
    for opts in per_output:
        nxt = []
        for g, vals in pieces:
            for h, c in opts:
                gh = conj(g, h)
                if is_satisfiable(gh):
                    nxt.append((tidy(gh), vals + (c,)))
        pieces = nxt
    if domain is not None:
        pieces = [(g, v) for g, v in pieces if is_satisfiable(conj(g, domain))]
    return PiecewiseAffineFunction(tuple(inputs), tuple(pieces))


def definable_choice(s: Formula, params: Sequence[str], y: str, bound: int,
                     domain: Formula = TRUE) -> list[PiecewiseAffineFunction]:
    """Selectors ``H_1..H_M`` whose graphs cover ``s`` over ``domain``.

    ``H_1`` picks the least element of each fiber, ``H_k`` the next larger
    one, repeating the previous value once the fiber is exhausted.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    taken = set(params) | {y} | set(free_variables(s))
    chain = []
    for i in range(bound + 1):
        chain.append(fresh_name(f"{y}{i}", taken))
        taken.add(chain[-1])
    at = lambda v: substitute(s, {y: LinearTerm.var(v)})
    increasing = conj(*(lt(LinearTerm.var(chain[i]), LinearTerm.var(chain[i + 1])) for i in range(bound)))
    too_many = exists_many(chain, conj(increasing, *(at(v) for v in chain)))
    if is_satisfiable(conj(domain, too_many)):
        raise FiberSizeError(f"some fiber has more than {bound} elements")
    if not is_valid(implies(domain, exists(y, s))):
        raise EmptyFiberError("some fiber over the declared domain is empty")

    yv = LinearTerm.var(y)
    w = fresh_name("w", taken)
    taken.add(w)
    wv = LinearTerm.var(w)
    least = conj(s, forall(w, implies(lt(wv, yv), neg(at(w)))))
    graphs = [least]
    prev = fresh_name("p", taken)
    pv = LinearTerm.var(prev)
    for _ in range(1, bound):
        g_prev = substitute(graphs[-1], {y: pv})
        nothing_between = forall(w, implies(conj(lt(pv, wv), lt(wv, yv)), neg(at(w))))
        nothing_after = forall(w, implies(lt(pv, wv), neg(at(w))))
        step = disj(conj(lt(pv, yv), s, nothing_between), conj(eq(yv - pv), nothing_after))
        graphs.append(exists(prev, conj(g_prev, step)))
    return [extract_piecewise_affine(g, len(params), 1, tuple(params) + (y,), domain=domain)
            for g in graphs]
