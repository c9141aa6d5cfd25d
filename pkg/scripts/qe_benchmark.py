"""Time quantifier elimination on random formulas and check the results by
windowed enumeration on a grid."""
import argparse
import random
import statistics
import time

from presloci.presburger import conj, disj, dvd, evaluate, exists, forall, ge, implies, neg
from presloci.presburger.formula import is_quantifier_free
from presloci.presburger.qe import eliminate_quantifiers
from presloci.presburger.terms import LinearTerm as T

WINDOW = 6


def random_formula(rng, nq):
    free = ["x", "w"][: rng.randint(1, 2)]
    qv = [f"z{i}" for i in range(nq)]

    def atom(vs):
        t = T.make({v: rng.randint(-5, 5) for v in vs if rng.random() < 0.7}, rng.randint(-5, 5))
        a = dvd(rng.choice([2, 3, 4, 5]), t) if rng.random() < 0.25 else ge(t)
        return neg(a) if rng.random() < 0.2 else a

    def boolean(vs, depth=2):
        if depth == 0 or rng.random() < 0.3:
            return atom(vs)
        parts = [boolean(vs, depth - 1) for _ in range(rng.randint(2, 3))]
        return conj(*parts) if rng.random() < 0.5 else disj(*parts)

    f = boolean(free + qv)
    for v in reversed(qv):
        c = T.var(free[0])
        g = conj(ge(T.var(v) - c + WINDOW), ge(c - T.var(v) + WINDOW))
        f = exists(v, conj(g, f)) if rng.random() < 0.5 else forall(v, implies(g, f))
    return f, free


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid", type=int, default=8, help="check points in [-grid, grid]^free")
    args = ap.parse_args()
    rng = random.Random(args.seed)
    for nq in (1, 2, 3):
        times, sizes, wrong = [], [], 0
        for _ in range(args.count):
            f, free = random_formula(rng, nq)
            t0 = time.perf_counter()
            g = eliminate_quantifiers(f)
            times.append(time.perf_counter() - t0)
            assert is_quantifier_free(g)
            sizes.append(len(str(g)))
            pts = [(a, b) for a in range(-args.grid, args.grid + 1) for b in range(-2, 3)]
            for a, b in pts:
                env = dict(zip(free, (a, b)))
                if evaluate(f, env, box=args.grid + WINDOW) != evaluate(g, env):
                    wrong += 1
        print(f"quantifiers={nq}  median={statistics.median(times) * 1e3:.2f}ms  "
              f"max={max(times) * 1e3:.1f}ms  median_size={statistics.median(sizes):.0f}  mismatches={wrong}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
