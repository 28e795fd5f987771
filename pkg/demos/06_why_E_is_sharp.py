"""Why no turning point lies right of E, and why E is attained in the limit.

The limit function (2^s - 1)/(2^s + 1) zeta(s) has a turning point exactly at
s = E.  A winding number around it certifies that the point persists under
small perturbations, which is what the lattice search exploits.  The
inequality checks behind the upper bound are run on grids.
"""

from zetabound import LimitFunction, PrecisionContext, check_inequality_A3, check_u_bound, find_turning_points, solve_E, winding_number
from zetabound.curves import PolynomialFunction
from zetabound.numerics import format_decimal


def main():
    E = solve_E(30)
    tp = find_turning_points(2.8, LimitFunction(), PrecisionContext(40), certify=True)
    print("limit-function turning point:", format_decimal(tp.location.real, 31))
    print("E                           :", E.decimal())
    center, radius, omega = tp.winding_certificate
    print(f"winding number at radius {radius}: {omega}")

    print("\nwinding of 1 + z^2 - z^3 around its turning point z = 0:")
    for n in (64, 128, 256):
        print(f"  {n} samples -> {winding_number(0, 0.1, PolynomialFunction([1, 0, 1, -1]), samples=n)}")

    print("\ngrid violations of the auxiliary inequality:", len(check_inequality_A3(100, 100)))
    for row in check_u_bound():
        print(f"  u({row['t']}) = {row['u']}  (u - E = {row['u_minus_E']})")


if __name__ == "__main__":
    main()
