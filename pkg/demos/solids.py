"""Local formulas for a few lattice polytopes in dimension three.

The Reeve tetrahedron is the interesting one: its only lattice points are
its vertices, yet its volume is 1/2, and its vertex values come out with
large denominators.  Every mu is computed from the regions, without
counting points; counting is used only for the comparison line.

    python demos/solids.py
"""
import argparse
import time
from itertools import product

from ehrlocal.domains import DomainPolicy
from ehrlocal.linalg import GeometryContext, fmt
from ehrlocal.mu import local_formula
from ehrlocal.polyhedra import Polytope
from ehrlocal.verify import ehrhart_interpolate

SOLIDS = {
    "cube": list(product((0, 1), repeat=3)),
    "simplex": [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)],
    "reeve": [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 3)],
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", metavar="NAME",
                    help="any of %s (default: all)" % ", ".join(sorted(SOLIDS)))
    args = ap.parse_args(argv)
    unknown = set(args.names) - set(SOLIDS)
    if unknown:
        ap.error("unknown solid: %s" % ", ".join(sorted(unknown)))
    ctx = GeometryContext.standard(3)
    for name in args.names or sorted(SOLIDS):
        P = Polytope(SOLIDS[name])
        start = time.time()
        rep = local_formula(ctx, DomainPolicy("voronoi"), P)
        elapsed = time.time() - start
        print("%s (%.1fs)" % (name, elapsed))
        for d in range(3):
            vals = sorted(set(rep.mu_by_dim(d)))
            print("  mu on %d-faces: %s" % (d, ", ".join(fmt(v) for v in vals)))
        local = [fmt(c) for c in reversed(rep.coefficients)]
        counted = [fmt(c) for c in reversed(ehrhart_interpolate(ctx, P).coefficients)]
        print("  coefficients %s, counting gives %s" % (local, counted))


if __name__ == "__main__":
    main()
