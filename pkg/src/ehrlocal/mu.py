"""The weights mu(C) and the local formula for Ehrhart coefficients.

mu(C0) = 1 and, for a pointed cone C,

    mu(C) = v_C - sum_{K < C} w^C_K mu(K)

where v_C is the volume of R(C) inside the domain complex of the polar cone
and w^C_K the relative volume of R(C) intersected with K^perp and the polar
cone.  A cone with lineality space U is reduced to C intersected with U^perp,
computed in the induced lattice of U^perp with the restricted Gram matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .domains import DomainPolicy
from .halfopen import HCell
from .linalg import (
    GeometryContext, Q, dot, fmt, identity, induced_lattice_basis, matmul,
    matvec, orth_complement, projector, coordinates, transpose,
)
from .polyhedra import Cone, Polytope, dual_description, normal_cone, relative_volume
from .regions import RegionEngine, _to_lattice, engine_for

__all__ = [
    "MuTable", "LocalFormulaReport", "dc_volume", "correction_volume", "mu",
    "mu_table", "local_formula", "gram_from_group", "orbit_constancy",
    "reduce_cone",
]


@dataclass
class MuEntry:
    mu: object
    v: object
    w: dict  # face key -> w^C_K


class MuTable:
    """Memoized mu values for one region engine, with the v and w ledgers."""

    def __init__(self, engine: RegionEngine):
        self.engine = engine
        self.entries = {}

    def polar_cell(self, C, strict=False):
        n = self.engine.n
        rows = [(self.engine.gvec(r), 0) for r in C.rays]
        if strict:
            return HCell.from_constraints(n, strict=rows)
        return HCell.from_constraints(n, weak=rows)

    def v(self, C):
        """v_C: volume of the shards of R(C) at lattice points of the polar cone."""
        e = self.engine
        if C.dim == 0:
            return mpq(1)
        R = e.region(C)
        ws = [e.gvec(r) for r in C.rays]
        total = mpq(0)
        for y, cells in R.shards.items():
            if all(dot(w, y) <= 0 for w in ws):
                total += sum((c.volume() for c in cells), mpq(0))
        return total

    def w(self, C, K):
        """w^C_K: relative volume of R(C) cut by K^perp and the polar cone."""
        e = self.engine
        if K.key == C.key:
            return mpq(1)
        R = e.region(C)
        polar = self.polar_cell(C)
        if K.dim == 0:
            total = mpq(0)
            for y, cells in R.shards.items():
                for c in cells:
                    total += c.translate(y).intersect(polar).volume()
            return total
        B = induced_lattice_basis(e.ctx, orth_complement(e.ctx, K.rays))
        origin = (0,) * e.n
        total = mpq(0)
        for y, cells in R.shards.items():
            for c in cells:
                piece = c.translate(y).intersect(polar)
                if piece.is_empty():
                    continue
                total += piece.slice(origin, B).volume()
        return total

    def entry(self, C) -> MuEntry:
        E = self.entries.get(C.key)
        if E is not None:
            return E
        if C.dim == 0:
            E = MuEntry(mpq(1), mpq(1), {})
        else:
            v = self.v(C)
            w = {}
            total = v
            for K in self.engine.proper_faces(C):
                wk = self.w(C, K)
                w[K.key] = wk
                if wk:
                    total -= wk * self.entry(K).mu
            E = MuEntry(total, v, w)
        self.entries[C.key] = E
        return E

    def mu(self, C):
        return self.entry(C).mu

    def check_recursion(self):
        """Every stored entry satisfies the recursion with its own v and w."""
        for key, E in self.entries.items():
            if not key[0] and not key[1]:
                if E.mu != 1:
                    return False
                continue
            s = E.v
            for k, wk in E.w.items():
                s -= wk * self.entries[k].mu
            if s != E.mu:
                return False
        return True


_TABLES = {}


def mu_table(ctx: GeometryContext, policy: DomainPolicy) -> MuTable:
    sctx = ctx if ctx.is_standard_lattice else ctx.standardized()
    key = (sctx.key, policy.key)
    t = _TABLES.get(key)
    if t is None:
        t = _TABLES[key] = MuTable(engine_for(sctx, policy))
    return t


def reduce_cone(ctx: GeometryContext, policy: DomainPolicy, C: Cone):
    """For a non-pointed cone return ``(sub_ctx, sub_policy, C')`` with C'
    pointed in the lattice coordinates of Z^n intersected with U^perp."""
    U = list(C.lineality)
    W = orth_complement(ctx, U)
    B = induced_lattice_basis(ctx, W)
    B = tuple(tuple(Q(x) for x in b) for b in B)
    gram = matmul(matmul(B, ctx.gram), transpose(B))
    sub = GeometryContext(gram)
    P = projector(ctx, B)
    rays = [coordinates(B, matvec(P, r)) for r in C.rays]
    Cp = dual_description(len(B), generators=rays)
    pol = policy
    if policy.shift is not None:
        pol = DomainPolicy(policy.kind, tuple(coordinates(B, matvec(P, policy.shift))))
    return sub, pol, Cp


def _prepare(ctx, policy, C):
    sctx, C = _to_lattice(ctx, C)
    if not C.pointed:
        pol = policy
        if policy.shift is not None and not ctx.is_standard_lattice:
            pol = DomainPolicy(policy.kind, tuple(ctx.to_lattice_coords(policy.shift)))
        sctx, pol, C = reduce_cone(sctx, pol, C)
        return mu_table(sctx, pol), C
    if policy.shift is not None and not ctx.is_standard_lattice:
        policy = DomainPolicy(policy.kind, tuple(ctx.to_lattice_coords(policy.shift)))
    return mu_table(sctx, policy), C


def dc_volume(ctx, policy, C):
    """v_C for a pointed cone."""
    T, C = _prepare(ctx, policy, C)
    return T.v(C)


def correction_volume(ctx, policy, C, K):
    """w^C_K for a face K of the pointed cone C (1 when K = C)."""
    T, C2 = _prepare(ctx, policy, C)
    _, K2 = _to_lattice(ctx, K)
    return T.w(C2, K2)


def mu(ctx, policy, C):
    """mu(C) for any rational cone."""
    T, C = _prepare(ctx, policy, C)
    return T.mu(C)


# -- local formula ---------------------------------------------------------


@dataclass
class FaceRow:
    index: int
    dim: int
    vertices: tuple
    cone: Cone
    mu: object
    vol: object

    @property
    def contribution(self):
        return self.mu * self.vol


@dataclass
class LocalFormulaReport:
    rows: list
    coefficients: list  # e_0 .. e_d
    policy: DomainPolicy
    gram: tuple
    dim: int = 0

    def by_dim(self, d):
        return [r for r in self.rows if r.dim == d]

    def mu_by_dim(self, d):
        return sorted(r.mu for r in self.by_dim(d))

    def to_dict(self):
        return {
            "faces": [{"dim": r.dim, "vertices": [[fmt(x) for x in v] for v in r.vertices],
                       "mu": fmt(r.mu), "vol": fmt(r.vol), "contribution": fmt(r.contribution)}
                      for r in self.rows],
            "coefficients": [fmt(c) for c in reversed(self.coefficients)],
            "policy": {"kind": self.policy.kind,
                       "shift": None if self.policy.shift is None
                       else [fmt(x) for x in self.policy.shift]},
            "gram": [[fmt(x) for x in row] for row in self.gram],
        }


def _reduce_polytope(ctx, P):
    """Context and vertices of a lower-dimensional polytope in the lattice
    coordinates of its direction space."""
    verts = [ctx.to_lattice_coords(v) for v in P.vertices]
    sctx = ctx.standardized()
    v0 = verts[0]
    diffs = [tuple(a - b for a, b in zip(v, v0)) for v in verts[1:]]
    B = induced_lattice_basis(sctx, diffs)
    B = tuple(tuple(Q(x) for x in b) for b in B)
    gram = matmul(matmul(B, sctx.gram), transpose(B))
    coords = [coordinates(B, tuple(a - b for a, b in zip(v, v0))) for v in verts]
    return GeometryContext(gram), coords, B


def local_formula(ctx: GeometryContext, policy: DomainPolicy, P: Polytope) -> LocalFormulaReport:
    """Coefficients e_i = sum over i-faces f of mu(N_f) vol(f)."""
    d = P.dim
    if d == 0:
        rows = [FaceRow(0, 0, P.vertices, dual_description(ctx.n, generators=[],
                        lineality=identity(ctx.n)), mpq(1), mpq(1))]
        return LocalFormulaReport(rows, [mpq(1)], policy, ctx.gram, 0)
    if d < ctx.n or not ctx.is_standard_lattice:
        sub, coords, B = _reduce_polytope(ctx, P)
        pol = policy
        if policy.shift is not None:
            s = ctx.to_lattice_coords(policy.shift)
            pol = DomainPolicy(policy.kind, tuple(coordinates(B, matvec(projector(ctx.standardized(), B), s))))
        Q2 = Polytope(coords)
        inner_rep = local_formula(sub, pol, Q2)
        # map the rows back to the original vertices
        back = {}
        for v in P.vertices:
            c = coordinates(B, tuple(a - b for a, b in zip(ctx.to_lattice_coords(v),
                                                           ctx.to_lattice_coords(P.vertices[0]))))
            back[tuple(c)] = v
        rows = []
        for r in inner_rep.rows:
            rows.append(FaceRow(r.index, r.dim, tuple(back[tuple(v)] for v in r.vertices),
                                r.cone, r.mu, r.vol))
        return LocalFormulaReport(rows, inner_rep.coefficients, policy, ctx.gram, d)
    T = mu_table(ctx, policy)
    lat = P.lattice
    rows = []
    coeffs = [mpq(0)] * (d + 1)
    for i in range(len(lat)):
        pts = P.face_points(i)
        N = normal_cone(ctx, P, i)
        m = T.mu(N)
        vol = relative_volume(ctx, pts)
        rows.append(FaceRow(i, lat.dims[i], tuple(pts), N, m, vol))
        coeffs[lat.dims[i]] += m * vol
    return LocalFormulaReport(rows, coeffs, policy, ctx.gram, d)


# -- symmetry ----------------------------------------------------------------


def _group_closure(gens, limit=10000):
    n = len(gens[0])
    I = identity(n)
    I = tuple(tuple(int(x) for x in row) for row in I)
    elems = {I}
    frontier = [I]
    gens = [tuple(tuple(int(x) for x in row) for row in g) for g in gens]
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                p = tuple(tuple(sum(a[i][k] * g[k][j] for k in range(n)) for j in range(n))
                          for i in range(n))
                if p not in elems:
                    elems.add(p)
                    new.append(p)
                    if len(elems) > limit:
                        raise ValueError("group is not finite within %d elements" % limit)
        frontier = new
    return sorted(elems)


def gram_from_group(generators, n=None):
    """Invariant Gram matrix (1/|G|) sum A^T A over the generated group."""
    if not generators:
        if n is None:
            raise ValueError("dimension needed for the trivial group")
        return identity(n)
    for g in generators:
        from .linalg import det
        if abs(det([[Q(x) for x in row] for row in g])) != 1:
            raise ValueError("generator does not preserve the lattice")
    elems = _group_closure(generators)
    n = len(elems[0])
    S = [[mpq(0)] * n for _ in range(n)]
    for A in elems:
        AtA = matmul(transpose(A), A)
        for i in range(n):
            for j in range(n):
                S[i][j] += AtA[i][j]
    G = tuple(tuple(x / len(elems) for x in row) for row in S)
    for A in elems:
        if matmul(matmul(transpose(A), G), A) != G:
            raise ValueError("averaged form is not invariant")
    return G


def orbit_constancy(ctx, policy, P: Polytope, generators, center=None):
    """Partition the faces of P into orbits of the group (acting linearly
    about ``center``, default the vertex barycenter) and compare mu on each.

    Returns ``(ok, orbits)`` where ``orbits`` lists ``(face indices, mu values)``.
    """
    rep = local_formula(ctx, policy, P)
    elems = _group_closure(generators) if generators else [identity(P.n)]
    if center is None:
        center = tuple(sum((v[j] for v in P.vertices), mpq(0)) / len(P.vertices)
                       for j in range(P.n))
    center = tuple(Q(x) for x in center)
    faces = {frozenset(r.vertices): r for r in rep.rows}
    seen = set()
    orbits = []
    ok = True
    for r in rep.rows:
        key = frozenset(r.vertices)
        if key in seen:
            continue
        orbit = set()
        for A in elems:
            img = frozenset(tuple(c + x for c, x in zip(center, matvec(A, tuple(v - c for v, c in zip(p, center)))))
                            for p in r.vertices)
            if img not in faces:
                raise ValueError("group does not preserve the polytope")
            orbit.add(img)
        seen |= orbit
        vals = sorted(set(faces[f].mu for f in orbit))
        orbits.append((sorted(faces[f].index for f in orbit), vals))
        if len(vals) != 1:
            ok = False
    return ok, orbits
