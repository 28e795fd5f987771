"""Finding a height t where zeta behaves like its extremal limit.

We want t log 2 close to pi and t log p close to 0 (mod 2 pi) for the next
primes.  LLL reduction of an integer lattice finds such t; at that height the
roots of zeta(s) = 1 and zeta'(s) = 0 sit close to sigma(1) and E.
"""

import argparse

from zetabound import LatticeParams, search_report
from zetabound.height_search import dumps


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=10, help="number of primes")
    parser.add_argument("--nu", type=int, default=90, help="phase scaling bits")
    parser.add_argument("--r", type=int, default=30, help="height resolution bits")
    parser.add_argument("--json", action="store_true", help="print the full report")
    args = parser.parse_args()

    report = search_report(LatticeParams(n=args.n, nu=args.nu, r=args.r))
    if args.json:
        print(dumps(report), end="")
        return
    best = report["candidates"][0]
    print(f"best height t = {best['t']}")
    print(f"worst phase error over {args.n} primes: {best['score']} rad")
    pair = report["pair"]
    print(f"root of zeta(s) = 1 : Re s = {pair['s_one']['re']}")
    print(f"root of zeta'(s) = 0: Re s = {pair['rho']['re']}")
    print(f"their horizontal gap: {pair['delta'][0]} (limit value E - sigma(1) = 0.8729...)")
    print("bounds respected:", not pair["bound_violations"])


if __name__ == "__main__":
    main()
