"""Symbolic p-adic loci against Q_p and F_p((t)) numerics for the p-adic
fixtures; writes one JSON report per fixture."""
import argparse
import itertools
import json
import time
from pathlib import Path

from presloci.fixtures import PADIC_FIXTURES, load_padic_fixture
from presloci.padic import transfer_check

KINDS = ["integrability", "boundedness", "vanishing"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=int, nargs="+", default=[2, 3, 5, 7])
    ap.add_argument("--radius", type=int, default=3)
    ap.add_argument("--depth", type=int, default=24)
    ap.add_argument("--offset", type=int, default=4)
    ap.add_argument("--out", type=Path, default=None, help="directory for JSON reports")
    args = ap.parse_args()
    bad = 0
    for name in sorted(PADIC_FIXTURES):
        f = load_padic_fixture(name)
        r = args.radius if len(f.params) == 1 else min(args.radius, 2)
        box = [range(-r, r + 1)] * len(f.params)
        kinds = ["integrability"] if f.oscillation else KINDS
        t0 = time.perf_counter()
        rep = transfer_check(f, kinds, args.primes, box, args.depth, args.offset)
        dt = time.perf_counter() - t0
        npts = len(list(itertools.product(*box)))
        print(f"{name:<14} ok={rep.ok!s:<5} points={npts:<3} verdicts={len(rep.verdicts):<4} "
              f"oscillatory={len(rep.oscillatory):<4} counterexamples={len(rep.counterexamples)}  {dt:.1f}s")
        bad += not rep.ok
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"{name}.json").write_text(json.dumps(rep.to_json(), sort_keys=True, indent=2))
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
