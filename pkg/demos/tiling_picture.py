"""Draw the tiling of a dilated polygon by translated regions.

Searches for the first dilation factor at which the translates x + R(N_f)
tile the covering cells exactly and writes an SVG of that tiling.  Before
that factor the check fails and the demo reports the offending point.

    python demos/tiling_picture.py --out triangle.svg
"""
import argparse

from ehrlocal.domains import DomainPolicy
from ehrlocal.linalg import GeometryContext, fmt
from ehrlocal.polyhedra import Polytope
from ehrlocal.svg import tiling_svg
from ehrlocal.verify import count_points, verify_global_tiling

POLYGONS = {
    "triangle": [(1, 0), (2, 1), (0, 2)],
    "square": [(0, 0), (1, 0), (1, 1), (0, 1)],
    "pentagon": [(0, 0), (2, 0), (3, 1), (1, 3), (0, 2)],
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--polygon", choices=sorted(POLYGONS), default="triangle")
    ap.add_argument("--policy", choices=["voronoi", "box"], default="voronoi")
    ap.add_argument("--hex", action="store_true", help="use the hexagonal inner product")
    ap.add_argument("--tmax", type=int, default=8)
    ap.add_argument("--out", default="tiling.svg")
    args = ap.parse_args(argv)

    ctx = GeometryContext(((2, 1), (1, 2)) if args.hex else ((1, 0), (0, 1)))
    policy = DomainPolicy(args.policy)
    P = Polytope(POLYGONS[args.polygon])
    for t in range(1, args.tmax + 1):
        ok, witness = verify_global_tiling(ctx, policy, P, t)
        if ok:
            break
        print("t=%d: no tiling, trouble at (%s)" % (t, ", ".join(fmt(x) for x in witness)))
    else:
        print("no tiling up to t=%d" % args.tmax)
        return 1
    print("t=%d: exact tiling; %d lattice points in tP" % (t, count_points(ctx, P, t)))
    with open(args.out, "w") as fh:
        fh.write(tiling_svg(ctx, policy, P, t))
    print("wrote %s" % args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
