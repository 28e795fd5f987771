"""How far right can zeta take the value 1, have a critical point, or have Re zeta = 0?

Each supremum is the root of a real equation in sigma.  The solver returns a
certified enclosure, so the three constants can be compared without doubt.
"""

import argparse

from zetabound import solve_A, solve_E, solve_sigma_a, solve_sigma_one


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--digits", type=int, default=45, help="decimal digits")
    args = parser.parse_args()

    A, s1, E = solve_A(args.digits), solve_sigma_one(args.digits), solve_E(args.digits)
    print("Re zeta(s) can vanish only for Re s <", A.decimal())
    print("zeta(s) = 1 only for Re s <=       ", s1.decimal())
    print("zeta'(s) = 0 only for Re s <=      ", E.decimal())
    print("enclosures are disjoint:", A.disjoint_from(s1) and s1.disjoint_from(E))

    print("\nThe same question for other targets a:")
    for a in ("1/2", "2", "10"):
        print(f"  sigma({a}) = {solve_sigma_a(a, 20).decimal()}")


if __name__ == "__main__":
    main()
