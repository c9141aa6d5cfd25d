"""Closed-form sums of the summable fixtures against exact partial sums
plus rigorous tail bounds."""
import argparse
from fractions import Fraction

from presloci.engine import sum_over_lattice
from presloci.fixtures import SUM_FIXTURES, load_sum_fixture
from presloci.oracle import grid_partial_sum, tail_bound
from presloci.ring import FixedQ


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=Fraction, nargs="+", default=[Fraction(2), Fraction(3), Fraction(5, 2)])
    ap.add_argument("--n1", type=int, default=200, help="truncation in dimension 1")
    ap.add_argument("--n2", type=int, default=60, help="truncation in dimension 2")
    args = ap.parse_args()
    failures = 0
    print(f"{'fixture':<16}{'q':>6}  {'closed form':>22}  {'|diff|':>10}  {'tail':>10}")
    for name in sorted(SUM_FIXTURES):
        f = load_sum_fixture(name)
        g = sum_over_lattice(f)
        n = args.n1 if len(f.lattice) == 1 else args.n2
        for q in args.q:
            fq = FixedQ(q)
            exact = g.value((), fq)
            diff = abs(exact - grid_partial_sum(f, fq, n))
            tail = tail_bound(f, (), fq, n)
            ok = tail is not None and diff <= tail
            failures += not ok
            print(f"{name:<16}{str(q):>6}  {float(exact):>22.15g}  {float(diff):>10.3g}  "
                  f"{float(tail) if tail is not None else float('nan'):>10.3g}{'' if ok else '  FAIL'}")
    print(f"failures: {failures}")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
