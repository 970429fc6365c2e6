"""Walk through the local values mu for small polygons.

Prints, face by face, the value mu(N_f), the lattice volume of the face
and their product, then compares the resulting coefficients with those
obtained by counting lattice points in dilates.

    python demos/local_values.py
    python demos/local_values.py --shift 1/4
"""
import argparse

from gmpy2 import mpq

from ehrlocal.domains import DomainPolicy
from ehrlocal.linalg import GeometryContext, fmt
from ehrlocal.mu import local_formula
from ehrlocal.polyhedra import Polytope
from ehrlocal.verify import ehrhart_interpolate

SQUARE = Polytope([(0, 0), (1, 0), (1, 1), (0, 1)])
TRIANGLE = Polytope([(1, 0), (2, 1), (0, 2)])


def show(title, ctx, policy, P):
    rep = local_formula(ctx, policy, P)
    print("== %s" % title)
    print("   %-4s %-28s %-8s %-6s %s" % ("dim", "vertices", "mu", "vol", "mu*vol"))
    for r in sorted(rep.rows, key=lambda r: (-r.dim, r.vertices)):
        verts = " ".join("(%s)" % ",".join(fmt(x) for x in v) for v in r.vertices)
        print("   %-4d %-28s %-8s %-6s %s" % (r.dim, verts, fmt(r.mu), fmt(r.vol), fmt(r.contribution)))
    local = [fmt(c) for c in reversed(rep.coefficients)]
    counted = [fmt(c) for c in reversed(ehrhart_interpolate(ctx, P).coefficients)]
    print("   local formula: %s" % local)
    print("   by counting:   %s\n" % counted)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--shift", default="1/4", help="horizontal shift for the shifted square")
    args = ap.parse_args(argv)
    std, hexagonal = GeometryContext.standard(2), GeometryContext(((2, 1), (1, 2)))
    vor = DomainPolicy("voronoi")

    show("unit square, standard inner product", std, vor, SQUARE)
    # the shift moves mass between opposite vertices and edges; the
    # coefficients cannot move
    eta = mpq(args.shift)
    show("unit square, domains shifted by (%s, 0)" % fmt(eta), std,
         DomainPolicy("voronoi", (eta, 0)), SQUARE)
    show("triangle, standard inner product", std, vor, TRIANGLE)
    # under the hexagonal product the triangle's symmetry becomes an isometry
    show("triangle, hexagonal inner product", hexagonal, vor, TRIANGLE)
    show("triangle, half-open box domains", std, DomainPolicy("box"), TRIANGLE)


if __name__ == "__main__":
    main()
