"""Print int/bdd/iva loci of the one-parameter families over a parameter
box, next to the monomial-oracle verdicts."""
import argparse

from presloci.engine import KINDS, compute_locus
from presloci.fixtures import LOCI_FAMILIES, load_family
from presloci.oracle import monomial_verdicts


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=int, default=-4)
    ap.add_argument("--hi", type=int, default=4)
    ap.add_argument("families", nargs="*", default=sorted(LOCI_FAMILIES))
    args = ap.parse_args()
    box = range(args.lo, args.hi + 1)
    mismatches = 0
    for name in args.families:
        f = load_family(name)
        print(f"== {name}: {LOCI_FAMILIES[name]}")
        res = {k: compute_locus(f, k) for k in KINDS}
        oracle = {s: monomial_verdicts(f, (s,)) for s in box}
        print("   s  " + "  ".join(f"{k[:3]:>5}" for k in KINDS))
        for s in box:
            cells = []
            for k in KINDS:
                got = res[k].contains((s,))
                mark = "" if got == oracle[s][k] else "!"
                mismatches += bool(mark)
                cells.append(f"{('yes' if got else 'no') + mark:>5}")
            print(f"{s:>4}  " + "  ".join(cells))
    print(f"mismatches: {mismatches}")
    return 1 if mismatches else 0


if __name__ == "__main__":
    raise SystemExit(main())
