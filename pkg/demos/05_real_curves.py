"""Drawing the curves where zeta is real.

Im zeta = 0 is traced by predictor-corrector continuation from every sign
change on a grid.  Curves that cross the window are I1, curves that come back
to the left edge are I2.  Turning points (vertical tangents) are marked, and
none can lie right of E.
"""

import argparse

from zetabound import Window, ZetaFunction, trace_real_curves, verify_turning_bound
from zetabound.curves import RotatedFunction, segments_svg, turning_points_on


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--window", default="1.2,3,1,50", help="sigma_min,sigma_max,t_min,t_max")
    parser.add_argument("--svg", default="real_curves.svg", help="output picture")
    args = parser.parse_args()

    window = Window.parse(args.window)
    fn = ZetaFunction(window.default_height())
    segs = trace_real_curves(window, fn)
    for seg in segs:
        print(f"{seg.kind:7s} from ({float(seg.sigma[0]):.3f}, {float(seg.tau[0]) + float(seg.height):.3f}), {len(seg.sigma)} points")
    tps = turning_points_on(segs, fn)
    for tp in tps:
        print(f"turning point at {complex(tp.location):.8f}")
    print("all turning points left of E:", not verify_turning_bound(tps)["falsified"])
    re_zero = trace_real_curves(window, RotatedFunction(fn, 1j))
    with open(args.svg, "w") as fh:
        fh.write(segments_svg(segs, window, re_zero, tps))
    print("picture written to", args.svg)


if __name__ == "__main__":
    main()
