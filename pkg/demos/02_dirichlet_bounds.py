"""Bounds for L(s, chi) = a over all characters of a fixed modulus.

For modulus q the extremal character sends the least prime not dividing q to
-1 and every larger prime to +1, which turns the question into a real root.
q = 1 is the zeta case and must reproduce sigma(1).
"""

import argparse

from zetabound import character_table, solve_l_bound, solve_sigma_one


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--digits", type=int, default=30, help="decimal digits")
    args = parser.parse_args()

    print("q = 1 agrees with sigma(1):")
    print("  ", solve_l_bound(1, 1, args.digits).decimal())
    print("  ", solve_sigma_one(args.digits).decimal())
    for q, a in ((4, 1), (7, 1), (4, "1/2")):
        n = len(character_table(q))
        print(f"q = {q} ({n} characters), a = {a}: Re s <= {solve_l_bound(q, a, args.digits).decimal()}")


if __name__ == "__main__":
    main()
