"""Regions R(C) of pointed rational cones.

Everything here works on the standard lattice Z^n (callers convert).  A
region is stored *sharded*: for every lattice point ``y`` the part of the
region inside ``y + T`` is kept as a list of cells translated back into
``T`` (T the domain of the full lattice).  Moving a region by a lattice
vector then only relabels shards, and two translated regions can only meet
inside a common shard.

Construction of R(C) for dim C >= 1, given the regions of the proper faces:

* start from the shards ``y`` of the strip ``T(C) + lin C`` whose cell
  ``y + T`` meets the polar cone; drop shards with ``y + T`` inside the open
  polar cone (these are the accepted translates of R(C0) = T);
* for every face K of positive dimension and every lattice point x of L(K)
  that passes the two acceptance tests, cut ``x + R(K)`` out of the shards;
* the window of shards is enlarged until the surviving shards sit well
  inside it.
"""
from __future__ import annotations

from gmpy2 import mpq

from .domains import DomainPolicy, domain_for
from .halfopen import HCell, HComplex, cells_meet, subtract_cells
from .linalg import (
    GeometryContext, Q, dot, identity, induced_lattice_basis, inverse, matvec,
    orth_complement,
)
from .polyhedra import Cone, dual_description

__all__ = [
    "Region", "RegionEngine", "engine_for", "build_region",
    "covering_domain_complex", "check_condition_I", "check_condition_II",
    "check_base_inclusion",
    "one_cone_tiling", "lattice_ball", "WindowError",
]

MAX_DOUBLINGS = 8


class WindowError(RuntimeError):
    """The region did not fit into any window tried."""


def _isqrt_floor(x):
    import math
    x = Q(x)
    if x <= 0:
        return 0
    return math.isqrt(x.numerator // x.denominator)


def lattice_ball(gram, r2):
    """All y in Z^n with y^T G y <= r2, sorted by norm then lexicographically."""
    n = len(gram)
    Ginv = inverse(gram)
    lims = [_isqrt_floor(r2 * Ginv[i][i]) for i in range(n)]
    out = []

    def rec(i, pref):
        if i == n:
            y = tuple(pref)
            nrm = dot(y, matvec(gram, y))
            if nrm <= r2:
                out.append((nrm, y))
            return
        for z in range(-lims[i], lims[i] + 1):
            rec(i + 1, pref + [z])

    rec(0, [])
    out.sort()
    return [y for _, y in out]


class Region:
    """R(C) for one cone, sharded over the domains of the full lattice."""

    def __init__(self, cone, shards, faces, window_sq, radius_sq, accepted):
        self.cone = cone
        self.shards = shards  # y -> tuple of cells inside T
        self.faces = faces  # proper faces of the cone (trivial cone first)
        self.window_sq = window_sq
        self.radius_sq = radius_sq
        self.accepted = accepted  # face key -> accepted translates seen in the window

    @property
    def key(self):
        return self.cone.key

    def cells(self, shift=None):
        """The region (optionally translated by a lattice vector) as cells."""
        out = []
        for y, cells in self.shards.items():
            z = y if shift is None else tuple(a + b for a, b in zip(y, shift))
            out.extend(c.translate(z) for c in cells)
        return out

    def complex(self):
        n = self.cone.n
        return HComplex(n, self.cells())

    def volume(self):
        return sum((c.volume() for cells in self.shards.values() for c in cells), mpq(0))

    def contains(self, p):
        return any(c.contains(p) for c in self.cells())

    def dump(self):
        lines = []
        for y in sorted(self.shards):
            for c in self.shards[y]:
                lines.append("%s: %s" % (y, c.translate(y).dump()))
        return "\n".join(lines)


class RegionEngine:
    """Builds and memoizes regions for one (Gram matrix, policy) pair on Z^n."""

    def __init__(self, ctx: GeometryContext, policy: DomainPolicy):
        if not ctx.is_standard_lattice:
            raise ValueError("the region engine works on the standard lattice")
        self.ctx = ctx
        self.policy = policy
        self.G = ctx.gram
        self.n = ctx.n
        self.T_domain = domain_for(policy, ctx, identity(self.n))
        self.T = self.T_domain.cell  # canonical basis of Z^n is the identity
        self._regions = {}
        self._faces = {}
        self._sup = {}
        self._meet = {}
        self._accept = {}
        self._groups = {}
        self._tsup = {}
        self.trivial = dual_description(self.n, generators=[])

    # small helpers ---------------------------------------------------------

    def gvec(self, v):
        """Integer covector proportional to G v."""
        return self.ctx.gram_int_covector(v)

    def pair(self, x, r):
        return dot(x, matvec(self.G, r))

    def lattice_basis(self, C):
        """Basis of L(C) = Z^n intersected with the orthogonal complement of C."""
        if C.dim == 0:
            return identity(self.n)
        if C.dim == self.n:
            return ()
        return induced_lattice_basis(self.ctx, orth_complement(self.ctx, C.rays))

    def domain(self, C):
        return domain_for(self.policy, self.ctx, self.lattice_basis(C))

    def proper_faces(self, C):
        f = self._faces.get(C.key)
        if f is None:
            f = [K for K in C.faces() if K.key != C.key]
            self._faces[C.key] = f
        return f

    def polar_rows(self, C):
        return [self.gvec(r) for r in C.rays]

    def in_L(self, x, K):
        return all(self.pair(x, r) == 0 for r in K.rays)

    def _T_sup(self, w):
        s = self._tsup.get(w)
        if s is None:
            s = self._tsup[w] = self.T.sup(w)
        return s

    def T_inside_open(self, y, C):
        """Is y + T contained in the open polar cone of C?"""
        for r in C.rays:
            w = self.gvec(r)
            s, att = self._T_sup(w)
            val = dot(w, y) + s
            if val > 0 or (val == 0 and att):
                return False
        return True

    def T_meets(self, y, rows_weak, rows_strict=()):
        """Does y + T meet {a.x <= b} (weak) and {a.x < b} (strict)?  Rows are (a, b)."""
        rows, flags = [], []
        for a, b in rows_weak:
            rows.append(tuple(a) + (Q(dot(a, y)) - Q(b),))
            flags.append(False)
        for a, b in rows_strict:
            rows.append(tuple(a) + (Q(dot(a, y)) - Q(b),))
            flags.append(True)
        from .halfopen import _int_row
        rows = [_int_row(r[:-1], r[-1]) for r in rows]
        return not self.T.add_rows(rows, flags).is_empty()

    # region construction ---------------------------------------------------

    def region(self, C: Cone) -> Region:
        R = self._regions.get(C.key)
        if R is not None:
            return R
        if not C.pointed:
            raise ValueError("regions are defined for pointed cones")
        if C.dim == 0:
            radius = max(dot(v, matvec(self.G, v)) for v in self.T.vertices())
            R = Region(C, {(0,) * self.n: (self.T,)}, [], mpq(0), radius, {})
        else:
            R = self._build(C)
        self._regions[C.key] = R
        return R

    def _build(self, C):
        faces = self.proper_faces(C)
        subs = [(K, self.region(K)) for K in faces if K.dim >= 1]
        D = self.domain(C)
        Tv = self.T.vertices()
        rT = max(dot(v, matvec(self.G, v)) for v in Tv)
        amb = D.ambient
        rTC = max((dot(v, matvec(self.G, v)) for v in amb.vertices()), default=mpq(0))
        rsub = max((R.radius_sq for _, R in subs), default=mpq(0))
        rho2 = 4 * (rsub + rTC + rT)
        if rho2 < 4:
            rho2 = mpq(4)
        polar = [(self.gvec(r), 0) for r in C.rays]
        strip_cells = {}
        for _ in range(MAX_DOUBLINGS):
            shards, accepted = self._build_window(C, D, subs, polar, rho2, strip_cells)
            far = max((dot(y, matvec(self.G, y)) for y in shards), default=mpq(0))
            if 4 * far <= rho2:
                break
            rho2 *= 4
        else:
            raise WindowError("region of %r still touches a window of squared radius %s"
                              % (C, rho2))
        radius = mpq(0)
        for y, cells in shards.items():
            for c in cells:
                for v in c.vertices():
                    p = tuple(a + b for a, b in zip(v, y))
                    r = dot(p, matvec(self.G, p))
                    if r > radius:
                        radius = r
        return Region(C, shards, faces, rho2, radius, accepted)

    def _strip_piece(self, D, y, cache):
        c = cache.get(y)
        if c is None:
            c = self.T.intersect(D.strip.translate(tuple(-v for v in y)))
            cache[y] = c
        return c

    def _build_window(self, C, D, subs, polar, rho2, strip_cache):
        pieces = {}
        for y in lattice_ball(self.G, rho2):
            c = self._strip_piece(D, y, strip_cache)
            if c.is_empty():
                continue
            if not self.T_meets(y, polar):
                continue
            if self.T_inside_open(y, C):
                continue
            pieces[y] = [c.pruned()]
        accepted = {self.trivial.key: None}
        for K, RK in subs:
            acc = set()
            cands = set()
            for y in pieces:
                for yp in RK.shards:
                    x = tuple(a - b for a, b in zip(y, yp))
                    if x not in cands:
                        cands.add(x)
            for x in sorted(cands):
                if not self.in_L(x, K):
                    continue
                if not self.accepts(C, K, x):
                    continue
                acc.add(x)
                for yp, cells in RK.shards.items():
                    y = tuple(a + b for a, b in zip(x, yp))
                    cur = pieces.get(y)
                    if cur:
                        pieces[y] = subtract_cells(cur, cells)
            accepted[K.key] = acc
        shards = {y: tuple(c) for y, c in pieces.items() if c}
        return shards, accepted

    # acceptance tests ------------------------------------------------------

    def region_sup(self, K, w):
        """(max of w.z over the closure of R(K), attained in R(K))."""
        key = (K.key, w)
        s = self._sup.get(key)
        if s is None:
            RK = self.region(K)
            best, att = None, False
            for y, cells in RK.shards.items():
                for c in cells:
                    m, a = c.sup(w)
                    m = m + dot(w, y)
                    if best is None or m > best:
                        best, att = m, a
                    elif m == best:
                        att = att or a
            s = self._sup[key] = (best, att)
        return s

    def condition_I(self, C, K, x):
        kr = set(K.rays)
        for r in C.rays:
            if r in kr:
                continue
            w = self.gvec(r)
            s, att = self.region_sup(K, w)
            val = dot(w, x) + s
            if val > 0 or (val == 0 and att):
                return False
        return True

    def _group(self, K2):
        """Shards of R(K2) grouped by their pairings with the rays of K2."""
        g = self._groups.get(K2.key)
        if g is None:
            g = {}
            ws = [self.gvec(r) for r in K2.rays]
            for y in self.region(K2).shards:
                g.setdefault(tuple(dot(w, y) for w in ws), []).append(y)
            self._groups[K2.key] = (ws, g)
            g = self._groups[K2.key]
        return g

    def _shards_meet(self, K, y1, K2, y2):
        key = (K.key, y1, K2.key, y2)
        m = self._meet.get(key)
        if m is None:
            m = cells_meet(self.region(K).shards[y1], self.region(K2).shards[y2])
            self._meet[key] = m
        return m

    def condition_II(self, C, K, x):
        kr = set(K.rays)
        RK = self.region(K)
        for K2 in self.proper_faces(C):
            k2 = set(K2.rays)
            if k2 <= kr or kr <= k2:
                continue
            ws, groups = self._group(K2)
            for y1 in RK.shards:
                z = tuple(a + b for a, b in zip(x, y1))
                for y2 in groups.get(tuple(dot(w, z) for w in ws), ()):
                    if self._shards_meet(K, y1, K2, y2):
                        return False
        return True

    def accepts(self, C, K, x):
        """Is x in X^C_K (both acceptance conditions)?"""
        key = (C.key, K.key, x)
        a = self._accept.get(key)
        if a is None:
            if K.dim == 0:
                a = self.T_inside_open(x, C)
            else:
                a = self.in_L(x, K) and self.condition_I(C, K, x) and self.condition_II(C, K, x)
            self._accept[key] = a
        return a

    def base_included(self, C):
        """Is the domain T(C) of L(C) contained in R(C)?  Returns (ok, witness)."""
        R = self.region(C)
        rest = subtract_cells([self.domain(C).ambient if C.dim else self.T], R.cells())
        if rest:
            return False, rest[0].witness()
        return True, None

    # derived sets ----------------------------------------------------------

    def translates_near(self, C, K, window_sq):
        """Accepted x in X^C_K whose translate x + R(K) meets the ball of
        squared radius ``window_sq`` (shard keys)."""
        RK = self.region(K)
        ball = lattice_ball(self.G, window_sq)
        out = set()
        seen = set()
        for y in ball:
            for yp in RK.shards:
                x = tuple(a - b for a, b in zip(y, yp))
                if x in seen:
                    continue
                seen.add(x)
                if self.in_L(x, K) and self.accepts(C, K, x):
                    out.add(x)
        return sorted(out)


_ENGINES = {}


def engine_for(ctx: GeometryContext, policy: DomainPolicy) -> RegionEngine:
    key = (ctx.key, policy.key)
    e = _ENGINES.get(key)
    if e is None:
        e = _ENGINES[key] = RegionEngine(ctx, policy)
    return e


def _to_lattice(ctx, C):
    """(standardized context, cone in lattice coordinates)."""
    if ctx.is_standard_lattice:
        return ctx, C
    rays = [ctx.to_lattice_coords(r) for r in C.rays]
    lin = [ctx.to_lattice_coords(l) for l in C.lineality]
    return ctx.standardized(), dual_description(ctx.n, generators=rays, lineality=lin)


def build_region(ctx, policy, C) -> Region:
    """R(C) for a pointed cone (in lattice coordinates when ctx has a basis)."""
    sctx, C = _to_lattice(ctx, C)
    return engine_for(sctx, policy).region(C)


def check_condition_I(ctx, policy, C, K, x):
    sctx, C = _to_lattice(ctx, C)
    _, K = _to_lattice(ctx, K)
    e = engine_for(sctx, policy)
    return e.in_L(tuple(x), K) and (K.dim == 0 and e.T_inside_open(tuple(x), C)
                                    or K.dim > 0 and e.condition_I(C, K, tuple(x)))


def check_base_inclusion(ctx, policy, C):
    """(ok, witness) for the containment of T(C) in R(C)."""
    sctx, C = _to_lattice(ctx, C)
    return engine_for(sctx, policy).base_included(C)


def check_condition_II(ctx, policy, C, K, x):
    sctx, C = _to_lattice(ctx, C)
    _, K = _to_lattice(ctx, K)
    e = engine_for(sctx, policy)
    if K.dim == 0:
        return True
    return e.condition_II(C, K, tuple(x))


def covering_domain_complex(ctx, policy, weak_rows, window_sq, strict_rows=()):
    """Translates y + T (y in Z^n, |y|_G^2 <= window_sq) meeting the set
    {a.x <= b} given by ``weak_rows`` (and optional strict rows).

    Returns ``{y: cell}``.
    """
    sctx = ctx if ctx.is_standard_lattice else ctx.standardized()
    e = engine_for(sctx, policy)
    out = {}
    for y in lattice_ball(e.G, window_sq):
        if e.T_meets(y, weak_rows, strict_rows):
            out[y] = e.T.translate(y)
    return out


def one_cone_tiling(ctx, policy, C, window_sq):
    """Pieces ``(face, x)`` of the tiling of the covering complex of the polar
    cone: translates of R(C) by L(C) and accepted translates of R(K), K < C,
    whose shards meet the lattice ball of squared radius ``window_sq``."""
    sctx, C = _to_lattice(ctx, C)
    e = engine_for(sctx, policy)
    R = e.region(C)
    out = []
    ball = lattice_ball(e.G, window_sq)
    LC = e.lattice_basis(C)
    seen = set()
    for y in ball:
        for yp in R.shards:
            x = tuple(a - b for a, b in zip(y, yp))
            if x in seen:
                continue
            seen.add(x)
            if e.in_L(x, C):
                out.append((C, x))
    for K in e.proper_faces(C):
        for x in e.translates_near(C, K, window_sq):
            out.append((K, x))
    return out
