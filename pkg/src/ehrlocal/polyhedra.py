"""Cones, lattice polytopes, face lattices, normal and polar cones.

All H/V conversions go through one exact double description engine
(:class:`DD`) working on integer rows; incidence bitmasks produced by it
also drive the face lattices and the volume triangulation.
"""
from __future__ import annotations

import math
from functools import cached_property
from itertools import combinations

from gmpy2 import mpq

from .linalg import (
    GeometryContext, Q, det, induced_lattice_basis, inverse, matvec, nullspace,
    primitive, rank, coordinates, vsub,
)

__all__ = [
    "DD", "Cone", "Polytope", "FaceLattice", "dual_description",
    "cone_face_lattice", "face_lattice", "normal_cone", "polar_cone",
    "relative_volume", "triangulated_volume", "canonical_key",
]


def _normalize(v):
    g = 0
    for x in v:
        g = math.gcd(g, x)
    if g > 1:
        return tuple(x // g for x in v)
    return tuple(v)


def _idot(u, v):
    return sum(a * b for a, b in zip(u, v))


class DD:
    """Double description of {z : r.z <= 0 for every added row r} over Z.

    ``lin`` holds a lineality basis, ``rays`` the extreme rays (modulo
    lineality) as ``[vector, mask]`` where bit ``i`` of ``mask`` is set iff
    the ray is tight on row ``i``.
    """

    __slots__ = ("dim", "lin", "rays", "nrows")

    def __init__(self, dim, lin=None, rays=None, nrows=0):
        self.dim = dim
        if lin is None:
            lin = [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
        self.lin = lin
        self.rays = rays if rays is not None else []
        self.nrows = nrows

    def copy(self):
        return DD(self.dim, list(self.lin), list(self.rays), self.nrows)

    def add(self, row):
        """Intersect with {z : row.z <= 0}; the row gets index ``nrows``."""
        bit = 1 << self.nrows
        prev = bit - 1
        self.nrows += 1
        lin = self.lin
        for k, l0 in enumerate(lin):
            s0 = _idot(row, l0)
            if s0:
                break
        else:
            s0 = 0
        if s0:
            a0 = abs(s0)
            sg = 1 if s0 > 0 else -1
            newlin = []
            for j, l in enumerate(lin):
                if j == k:
                    continue
                s = _idot(row, l)
                if s:
                    l = _normalize(tuple(a0 * x - sg * s * y for x, y in zip(l, l0)))
                newlin.append(l)
            rays = []
            for v, m in self.rays:
                s = _idot(row, v)
                if s:
                    v = _normalize(tuple(a0 * x - sg * s * y for x, y in zip(v, l0)))
                rays.append((v, m | bit))
            d = tuple(-sg * y for y in l0)
            rays.append((_normalize(d), prev))
            self.lin = newlin
            self.rays = rays
            return
        pos, neg, keep = [], [], []
        for v, m in self.rays:
            s = _idot(row, v)
            if s > 0:
                pos.append((v, m, s))
            elif s < 0:
                neg.append((v, m, s))
                keep.append((v, m))
            else:
                keep.append((v, m | bit))
        if pos and neg:
            allmasks = [m for _, m in self.rays]
            for vp, mp, sp in pos:
                for vq, mq, sq in neg:
                    Z = mp & mq
                    adjacent = True
                    for m in allmasks:
                        if m & Z == Z and m != mp and m != mq:
                            adjacent = False
                            break
                    if not adjacent:
                        continue
                    w = tuple(sp * b - sq * a for a, b in zip(vp, vq))
                    keep.append((_normalize(w), Z | bit))
        self.rays = keep


# -- volume ----------------------------------------------------------------


def _affine_rank(points, idx):
    idx = list(idx)
    if not idx:
        return -1
    p0 = points[idx[0]]
    return rank([vsub(points[i], p0) for i in idx[1:]]) if len(idx) > 1 else 0


def triangulated_volume(points, masks, k):
    """Lebesgue volume of conv(points) in R^k.

    ``masks[i]`` is the incidence bitmask of point ``i`` with a family of
    supporting hyperplanes that contains every facet.  The polytope is cut
    into simplices by coning from the smallest vertex over the facets not
    containing it, recursively.
    """
    if k == 0:
        return mpq(1) if points else mpq(0)
    if len(points) < k + 1:
        return mpq(0)
    memo_rank = {}

    def arank(S):
        r = memo_rank.get(S)
        if r is None:
            r = memo_rank[S] = _affine_rank(points, sorted(S))
        return r

    full = frozenset(range(len(points)))
    if arank(full) < k:
        return mpq(0)

    def tri(S, d):
        if d == 0:
            return [(next(iter(S)),)]
        if len(S) == d + 1:
            return [tuple(sorted(S))]
        apex = min(S)
        bits = 0
        for i in S:
            bits |= masks[i]
        seen = set()
        out = []
        while bits:
            b = bits & -bits
            bits ^= b
            F = frozenset(i for i in S if masks[i] & b)
            if apex in F or len(F) < d or F == S or F in seen:
                continue
            seen.add(F)
            if arank(F) != d - 1:
                continue
            for s in tri(F, d - 1):
                out.append((apex,) + s)
        return out

    total = mpq(0)
    for simplex in tri(full, k):
        p0 = points[simplex[0]]
        total += abs(det([vsub(points[i], p0) for i in simplex[1:]]))
    return total / math.factorial(k)


# -- cones -----------------------------------------------------------------


def _canon_lineality(vectors, n):
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return ()
    from .linalg import _rref
    R, _ = _rref(vectors)
    return tuple(primitive(r) for r in R)


def canonical_key(rays, lineality=()):
    return (tuple(sorted(primitive(r) for r in rays)), tuple(lineality))


class Cone:
    """Rational polyhedral cone with both descriptions.

    ``rays`` are primitive integer generators modulo ``lineality``;
    ``facets`` are integer covectors ``a`` with ``a.x <= 0`` on the cone and
    ``equations`` covectors vanishing on its span.
    """

    def __init__(self, n, rays, lineality, facets, equations):
        self.n = n
        self.rays = tuple(sorted(rays))
        self.lineality = tuple(lineality)
        self.facets = tuple(facets)
        self.equations = tuple(equations)

    @cached_property
    def dim(self):
        return rank(list(self.rays) + list(self.lineality)) if (self.rays or self.lineality) else 0

    @property
    def pointed(self):
        return not self.lineality

    @property
    def key(self):
        return (self.rays, self.lineality)

    def __eq__(self, other):
        return isinstance(other, Cone) and self.key == other.key and self.n == other.n

    def __hash__(self):
        return hash((self.n, self.key))

    def __repr__(self):
        return "Cone(rays=%r, lineality=%r)" % (self.rays, self.lineality)

    def contains(self, x):
        x = tuple(Q(v) for v in x)
        return all(sum(a * b for a, b in zip(f, x)) <= 0 for f in self.facets) and \
            all(sum(a * b for a, b in zip(e, x)) == 0 for e in self.equations)

    @cached_property
    def ray_facet_incidence(self):
        return [frozenset(i for i, r in enumerate(self.rays) if _idot(f, r) == 0)
                for f in self.facets]

    def faces(self):
        """All faces of a pointed cone as Cone objects, trivial cone first."""
        if not self.pointed:
            raise ValueError("face lattice requires a pointed cone")
        return [self.subcone(S) for S in _closure_lattice(self.ray_facet_incidence, len(self.rays))]

    def subcone(self, idx):
        rays = [self.rays[i] for i in sorted(idx)]
        return dual_description(self.n, generators=rays)


def _closure_lattice(facet_sets, m):
    full = frozenset(range(m))
    faces = {full}
    frontier = [full]
    sets = [frozenset(s) for s in facet_sets]
    while frontier:
        new = []
        for F in frontier:
            for s in sets:
                G = F & s
                if G not in faces:
                    faces.add(G)
                    new.append(G)
        frontier = new
    faces.add(frozenset())
    return sorted(faces, key=lambda S: (len(S), sorted(S)))


def _dd_from_rows(n, ineqs, eqs=()):
    dd = DD(n)
    for r in ineqs:
        dd.add(tuple(int(x) for x in r))
    for r in eqs:
        dd.add(tuple(int(x) for x in r))
        dd.add(tuple(-int(x) for x in r))
    return dd


def dual_description(n, generators=None, lineality=(), inequalities=None, equations=()):
    """Build a :class:`Cone` from generators (+lineality) or from inequalities
    ``a.x <= 0`` (+equations ``a.x = 0``)."""
    if generators is not None:
        gens = [primitive(g) for g in generators if any(g)]
        lin = [primitive(l) for l in lineality if any(l)]
        polar = _dd_from_rows(n, gens, lin)
        facets = [v for v, _ in polar.rays]
        eqs = list(polar.lin)
        dd = _dd_from_rows(n, facets, eqs)
    else:
        ineqs = [primitive(a) for a in inequalities if any(a)]
        eqs0 = [primitive(a) for a in equations if any(a)]
        dd = _dd_from_rows(n, ineqs, eqs0)
        polar = _dd_from_rows(n, [v for v, _ in dd.rays], dd.lin)
        facets = [v for v, _ in polar.rays]
        eqs = list(polar.lin)
    rays = sorted(set(v for v, _ in dd.rays))
    lin = _canon_lineality(dd.lin, n)
    return Cone(n, rays, lin, facets, [primitive(e) for e in eqs])


def cone_face_lattice(C: Cone):
    """Faces of a pointed cone, with ``leq(i, j)`` and incomparability helpers."""
    faces = C.faces()
    return FaceLattice.from_cones(faces)


def polar_cone(ctx: GeometryContext, C: Cone) -> Cone:
    ineqs = [ctx.gram_int_covector(r) for r in C.rays]
    eqs = [ctx.gram_int_covector(l) for l in C.lineality]
    return dual_description(ctx.n, inequalities=ineqs, equations=eqs)


# -- polytopes -------------------------------------------------------------


class FaceLattice:
    """Faces as frozensets of vertex (or ray) indices with their dimensions."""

    def __init__(self, faces, dims, items=None):
        order = sorted(range(len(faces)), key=lambda i: (dims[i], sorted(faces[i])))
        self.faces = [faces[i] for i in order]
        self.dims = [dims[i] for i in order]
        self.items = [items[i] for i in order] if items is not None else None
        self.index = {f: i for i, f in enumerate(self.faces)}

    @classmethod
    def from_cones(cls, cones):
        top = cones[-1]
        idx = {r: i for i, r in enumerate(top.rays)}
        faces = [frozenset(idx[r] for r in c.rays) for c in cones]
        return cls(faces, [c.dim for c in cones], cones)

    def __len__(self):
        return len(self.faces)

    def leq(self, i, j):
        return self.faces[i] <= self.faces[j]

    def comparable(self, i, j):
        return self.faces[i] <= self.faces[j] or self.faces[j] <= self.faces[i]

    def meet(self, i, j):
        """Greatest common lower face (intersection)."""
        S = self.faces[i] & self.faces[j]
        cands = [k for k, F in enumerate(self.faces) if F <= S]
        return max(cands, key=lambda k: len(self.faces[k])) if cands else None

    def join(self, i, j):
        """Smallest face containing both."""
        S = self.faces[i] | self.faces[j]
        cands = [k for k, F in enumerate(self.faces) if S <= F]
        return min(cands, key=lambda k: len(self.faces[k]))

    def count_by_dim(self):
        out = {}
        for d in self.dims:
            out[d] = out.get(d, 0) + 1
        return out


class Polytope:
    """Convex hull of finitely many rational points (lattice points in use).

    ``facets`` are pairs ``(a, b)`` meaning ``a.x <= b`` (primitive integer
    ``a``); ``equations`` describe the affine hull for lower-dimensional
    polytopes.  Non-extreme input points are dropped.
    """

    def __init__(self, points):
        pts = []
        seen = set()
        for p in points:
            p = tuple(Q(x) for x in p)
            if p not in seen:
                seen.add(p)
                pts.append(p)
        if not pts:
            raise ValueError("empty polytope")
        self.n = len(pts[0])
        # homogenized points (p, 1) scaled to integers
        rows = [_homog(p) for p in pts]
        polar = _dd_from_rows(self.n + 1, rows)
        facets = [v for v, _ in polar.rays]
        eqs = list(polar.lin)
        inc = [frozenset(i for i, r in enumerate(rows) if _idot(f, r) == 0) for f in facets]
        # drop points that are not vertices
        tight = [frozenset(j for j, s in enumerate(inc) if i in s) for i in range(len(pts))]
        verts = [i for i in range(len(pts))
                 if not any(j != i and tight[j] >= tight[i] and tight[j] != tight[i]
                            for j in range(len(pts)))]
        if len(pts) == 1:
            verts = [0]
        self.vertices = tuple(sorted(pts[i] for i in verts))
        pos = {p: i for i, p in enumerate(self.vertices)}
        self.facets = tuple((tuple(f[:-1]), -f[-1]) for f in facets)
        self.equations = tuple((tuple(e[:-1]), -e[-1]) for e in eqs)
        self.facet_vertices = tuple(
            frozenset(pos[pts[i]] for i in s if pts[i] in pos) for s in inc)
        self.dim = self.n - len(self.equations)

    def __repr__(self):
        return "Polytope(%r)" % (self.vertices,)

    def contains(self, x):
        x = tuple(Q(v) for v in x)
        return all(_qdot(a, x) <= b for a, b in self.facets) and \
            all(_qdot(a, x) == b for a, b in self.equations)

    def dilate(self, t):
        return Polytope([tuple(t * x for x in v) for v in self.vertices])

    def translate(self, z):
        return Polytope([tuple(x + Q(y) for x, y in zip(v, z)) for v in self.vertices])

    @cached_property
    def lattice(self) -> FaceLattice:
        return face_lattice(self)

    def face_points(self, i):
        return [self.vertices[j] for j in sorted(self.lattice.faces[i])]

    def facet_normals_of(self, i):
        F = self.lattice.faces[i]
        return [a for (a, b), S in zip(self.facets, self.facet_vertices) if F <= S]

    def bounding_box(self):
        lo = [min(v[j] for v in self.vertices) for j in range(self.n)]
        hi = [max(v[j] for v in self.vertices) for j in range(self.n)]
        return lo, hi

    def volume(self):
        """Relative volume w.r.t. the standard lattice Z^n (vertices count 1)."""
        return relative_volume(GeometryContext.standard(self.n), self.vertices)


def _qdot(a, x):
    return sum((Q(p) * q for p, q in zip(a, x)), mpq(0))


def _homog(p):
    den = 1
    for x in p:
        den = den * x.denominator // math.gcd(den, x.denominator)
    return tuple(int(x * den) for x in p) + (den,)


def face_lattice(P: Polytope) -> FaceLattice:
    m = len(P.vertices)
    faces = _closure_lattice(P.facet_vertices, m)
    faces = [F for F in faces if F]
    dims = [_affine_rank(P.vertices, sorted(F)) for F in faces]
    return FaceLattice(faces, dims)


def normal_cone(ctx: GeometryContext, P: Polytope, face) -> Cone:
    """Outer normal cone N_f w.r.t. <.,.>_G; ``face`` is an index into
    ``P.lattice`` or a set of vertex indices."""
    if isinstance(face, int):
        F = P.lattice.faces[face]
    else:
        F = frozenset(face)
    Ginv = inverse(ctx.gram)
    gens = [primitive(matvec(Ginv, a)) for (a, b), S in zip(P.facets, P.facet_vertices) if F <= S]
    lin = [primitive(matvec(Ginv, a)) for a, b in P.equations]
    return dual_description(ctx.n, generators=gens, lineality=lin)


def relative_volume(ctx: GeometryContext, points):
    """Lattice-normalized volume of conv(points) inside its affine hull.

    A single point has volume 1 by convention.
    """
    pts = [ctx.to_lattice_coords(p) for p in points]
    pts = list(dict.fromkeys(pts))
    if len(pts) == 1:
        return mpq(1)
    p0 = pts[0]
    diffs = [vsub(p, p0) for p in pts[1:]]
    std = GeometryContext.standard(ctx.n)
    basis = induced_lattice_basis(std, diffs)
    coords = [coordinates(basis, vsub(p, p0)) for p in pts]
    k = len(basis)
    rows = [_homog(c) for c in coords]
    polar = _dd_from_rows(k + 1, rows)
    masks = [0] * len(coords)
    for j, (f, _) in enumerate(polar.rays):
        for i, r in enumerate(rows):
            if _idot(f, r) == 0:
                masks[i] |= 1 << j
    return triangulated_volume(coords, masks, k)
