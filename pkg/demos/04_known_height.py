"""Checking a published near-extremal height directly.

t = 156326000 is far beyond Euler-Maclaurin territory, so zeta is evaluated
through a truncated Euler product with exact phase reduction.  The scan looks
within 3 of that height for the roots closest to the extremal limits.
Takes about 20 seconds.
"""

import argparse

from zetabound import verify_height


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--height", type=int, default=156326000, help="height t")
    args = parser.parse_args()

    pair = verify_height(args.height)
    for label, root in (("zeta(s) = 1 ", pair.s_one), ("zeta'(s) = 0", pair.rho)):
        print(f"{label}: s = {float(root.value.real):.9f} + {float(root.value.imag):.6f}i")
    print("bounds respected:", not pair.bound_violations())


if __name__ == "__main__":
    main()
