"""Brute-force oracles and end-to-end checks of the region tiling."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations

from gmpy2 import mpq

from .domains import DomainPolicy
from .halfopen import subtract_cells
from .linalg import GeometryContext, Q, box_points, dot, fmt, induced_lattice_basis, solve
from .mu import local_formula, mu_table
from .polyhedra import Cone, Polytope, dual_description, normal_cone, relative_volume
from .regions import engine_for

__all__ = [
    "EhrhartPolynomial", "count_points", "ehrhart_interpolate", "feasible_points",
    "verify_global_tiling", "verify_theorem1", "find_t0", "verify_lemma_volumes", "verify_local_formula",
    "valuation_probe", "random_polygons",
]


@dataclass(frozen=True)
class EhrhartPolynomial:
    """Coefficients e_0, ..., e_d of t -> |tP cap lattice|."""

    coefficients: tuple

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def __call__(self, t):
        return sum((c * t ** i for i, c in enumerate(self.coefficients)), mpq(0))

    def __str__(self):
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coefficients[i]
            if c:
                terms.append("%s t^%d" % (fmt(c), i) if i else fmt(c))
        return " + ".join(terms) or "0"


def _lattice_polytope(ctx, P):
    if ctx.is_standard_lattice:
        return ctx, P
    return ctx.standardized(), Polytope([ctx.to_lattice_coords(v) for v in P.vertices])


def count_points(ctx: GeometryContext, P: Polytope, t: int) -> int:
    """|tP cap lattice| by box enumeration."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    _, P = _lattice_polytope(ctx, P)
    if t == 0:
        return 1
    lo, hi = P.bounding_box()
    bounds = [(math.ceil(t * a), math.floor(t * b)) for a, b in zip(lo, hi)]
    facets = [(a, t * b) for a, b in P.facets]
    eqs = [(a, t * b) for a, b in P.equations]
    count = 0
    for p in box_points(bounds):
        if all(sum(x * y for x, y in zip(a, p)) <= b for a, b in facets) and \
                all(sum(x * y for x, y in zip(a, p)) == b for a, b in eqs):
            count += 1
    return count


def ehrhart_interpolate(ctx: GeometryContext, P: Polytope) -> EhrhartPolynomial:
    """Exact coefficients from the counts at t = 0..d."""
    d = P.dim
    ts = list(range(d + 1))
    vals = [mpq(count_points(ctx, P, t)) for t in ts]
    V = [[mpq(t) ** i for i in range(d + 1)] for t in ts]
    coeffs = solve(V, vals)
    return EhrhartPolynomial(tuple(coeffs))


# -- feasible points and the global tiling -------------------------------------


def _face_data(ctx, P):
    lat = P.lattice
    cones = [normal_cone(ctx, P, i) for i in range(len(lat))]
    return lat, cones


def feasible_points(ctx, policy, P: Polytope, f, t):
    """Feasible lattice points of the dilated face t*f (``f`` an index into
    ``P.lattice``): points p with p - t v in X^{N_v}_{N_f} for all vertices v
    of f."""
    sctx, P = _lattice_polytope(ctx, P)
    if P.dim != sctx.n:
        raise ValueError("feasible points need a full-dimensional polytope")
    e = engine_for(sctx, policy)
    lat = P.lattice
    F = lat.faces[f]
    verts = [P.vertices[j] for j in sorted(F)]
    if len(verts) == 1:
        return [tuple(int(t * x) for x in verts[0])]
    Nf = normal_cone(sctx, P, f)
    vcones = [normal_cone(sctx, P, frozenset([j])) for j in sorted(F)]
    # candidates: lattice points of aff(tf) near tf
    lo = [min(t * v[j] for v in verts) for j in range(sctx.n)]
    hi = [max(t * v[j] for v in verts) for j in range(sctx.n)]
    margin = 2
    bounds = [(math.floor(a) - margin, math.ceil(b) + margin) for a, b in zip(lo, hi)]
    base = tuple(int(t * x) for x in verts[0])
    out = []
    for p in box_points(bounds):
        diff = tuple(a - b for a, b in zip(p, base))
        if not e.in_L(diff, Nf):
            continue
        if all(e.accepts(Nv, Nf, tuple(a - int(t * b) for a, b in zip(p, v)))
               for Nv, v in zip(vcones, verts)):
            out.append(tuple(p))
    return out


def _tiling_pieces(ctx, policy, P, t):
    e = engine_for(ctx, policy)
    lat, cones = _face_data(ctx, P)
    pieces = {}  # shard key -> list of (face index, cells)
    X = {}
    for i in range(len(lat)):
        X[i] = feasible_points(ctx, policy, P, i, t)
        R = e.region(cones[i])
        for x in X[i]:
            for y, cells in R.shards.items():
                z = tuple(a + b for a, b in zip(x, y))
                pieces.setdefault(z, []).append((i, cells))
    return e, X, pieces


def covering_keys(e, P, t):
    """Lattice points z with (z + T) meeting tP."""
    lo, hi = P.bounding_box()
    Tlo, Thi = e.T.bbox()
    bounds = [(math.floor(t * a - th), math.ceil(t * b - tl))
              for a, b, tl, th in zip(lo, hi, Tlo, Thi)]
    rows = [(a, t * b) for a, b in P.facets]
    return {z for z in box_points(bounds) if e.T_meets(z, rows)}


def verify_global_tiling(ctx, policy, P: Polytope, t):
    """Do the translated regions x + R(N_f), x feasible for tf, tile the
    covering domain complex of tP?  Returns ``(ok, witness)``; the witness is
    a point that is doubly covered, uncovered or outside."""
    if t < 1:
        raise ValueError("t must be positive")
    sctx, P = _lattice_polytope(ctx, P)
    if P.dim != sctx.n:
        raise ValueError("the tiling check needs a full-dimensional polytope")
    e, X, pieces = _tiling_pieces(sctx, policy, P, t)
    target = covering_keys(e, P, t)
    for z in sorted(set(pieces) | target):
        plist = [c for _, cells in pieces.get(z, ()) for c in cells]
        if z not in target:
            if plist:
                return False, tuple(a + b for a, b in zip(plist[0].witness(), z))
            continue
        for a, b in combinations(plist, 2):
            c = a.intersect(b)
            if not c.is_empty():
                return False, tuple(p + q for p, q in zip(c.witness(), z))
        rest = subtract_cells([e.T], plist)
        if rest:
            return False, tuple(p + q for p, q in zip(rest[0].witness(), z))
    return True, None


verify_theorem1 = verify_global_tiling


def find_t0(ctx, policy, P, t_max=8):
    """Smallest t <= t_max for which the tiling check passes, else None."""
    for t in range(1, t_max + 1):
        if verify_global_tiling(ctx, policy, P, t)[0]:
            return t
    return None


def verify_lemma_volumes(ctx, policy, P: Polytope, t):
    """Check both volume identities at dilation t.

    * sum over faces of |X(tf)| v_{N_f} equals |tP cap lattice|;
    * for every face f, t^dim(f) vol(f) equals sum over g <= f of
      |X(tg)| w^{N_g}_{N_f}.

    Returns ``(ok, failures)`` with failures as ``(face index or None, lhs, rhs)``.
    """
    sctx, P = _lattice_polytope(ctx, P)
    T = mu_table(sctx, policy)
    lat, cones = _face_data(sctx, P)
    X = {i: feasible_points(sctx, policy, P, i, t) for i in range(len(lat))}
    failures = []
    lhs = sum((len(X[i]) * T.v(cones[i]) for i in range(len(lat))), mpq(0))
    rhs = count_points(sctx, P, t)
    if lhs != rhs:
        failures.append((None, lhs, rhs))
    for i in range(len(lat)):
        vol = relative_volume(sctx, P.face_points(i)) * mpq(t) ** lat.dims[i]
        s = mpq(0)
        for g in range(len(lat)):
            if lat.leq(g, i):
                s += len(X[g]) * T.w(cones[g], cones[i])
        if s != vol:
            failures.append((i, vol, s))
    return not failures, failures


def verify_local_formula(ctx, policy, P: Polytope):
    """Compare the local formula with brute-force interpolation.

    Returns ``(ok, report, ehrhart)``.
    """
    rep = local_formula(ctx, policy, P)
    E = ehrhart_interpolate(ctx, P)
    ok = tuple(rep.coefficients) == tuple(E.coefficients)
    return ok, rep, E


def valuation_probe(ctx, policy, pairs):
    """For cone pairs (C, K) whose union is convex, report
    mu(C u K) + mu(C n K) - mu(C) - mu(K)."""
    from .mu import mu as mu_of
    out = []
    for C, K in pairs:
        U = dual_description(ctx.n, generators=list(C.rays) + list(K.rays),
                             lineality=list(C.lineality) + list(K.lineality))
        I = dual_description(ctx.n, inequalities=list(C.facets) + list(K.facets),
                             equations=list(C.equations) + list(K.equations))
        vals = [mu_of(ctx, policy, X) for X in (C, K, U, I)]
        out.append({"C": C, "K": K, "union": U, "intersection": I,
                    "mu": vals, "discrepancy": vals[2] + vals[3] - vals[0] - vals[1]})
    return out


def random_polygons(seed, count=25, bound=3, max_points=6):
    """Seeded full-dimensional lattice polygons with vertices in [-bound, bound]^2."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        k = rng.randint(3, max_points)
        pts = {(rng.randint(-bound, bound), rng.randint(-bound, bound)) for _ in range(k)}
        if len(pts) < 3:
            continue
        P = Polytope(sorted(pts))
        if P.dim == 2:
            out.append(tuple(tuple(int(x) for x in v) for v in P.vertices))
    return out
