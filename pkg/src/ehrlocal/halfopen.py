"""Half-open convex cells and finite disjoint unions of them.

A cell in R^n is stored as homogenized integer rows ``r = (a, c)`` meaning
``a.x + c <= 0`` (weak) or ``a.x + c < 0`` (strict).  Row 0 is always the
homogenizing constraint ``s >= 0``.  The generators of the closure cone are
kept in a :class:`~ehrlocal.polyhedra.DD`, so intersecting with more rows is
incremental and emptiness, vertices and volume come for free.
"""
from __future__ import annotations

import math
from itertools import combinations

from gmpy2 import mpq

from .linalg import Q, dot, matvec
from .polyhedra import DD, triangulated_volume

__all__ = [
    "HCell", "HComplex", "cell_is_empty", "intersect", "subtract", "volume",
    "slice_complex", "contains_point", "verify_strict_tiling",
    "bounding_radius", "half_open_box", "cells_meet", "subtract_cells",
]


def _int_row(a, c):
    """Integer row proportional (positively) to the rational row (a, c)."""
    vals = [Q(x) for x in a] + [Q(c)]
    den = 1
    for x in vals:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in vals]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(ints)


class HCell:
    """Convex set cut out by weak and strict affine inequalities."""

    __slots__ = ("n", "rows", "strict", "dd", "_cache")

    def __init__(self, n, rows, strict, dd):
        self.n = n
        self.rows = rows
        self.strict = strict
        self.dd = dd
        self._cache = {}

    # construction --------------------------------------------------------

    @classmethod
    def space(cls, n):
        s_row = (0,) * n + (-1,)
        dd = DD(n + 1)
        dd.add(s_row)
        return cls(n, (s_row,), (False,), dd)

    @classmethod
    def from_constraints(cls, n, weak=(), strict=(), equations=()):
        """Build from ``(a, b)`` pairs meaning ``a.x <= b`` / ``a.x < b`` /
        ``a.x = b``."""
        rows, flags = [], []
        for a, b in weak:
            rows.append(_int_row(a, -Q(b)))
            flags.append(False)
        for a, b in strict:
            rows.append(_int_row(a, -Q(b)))
            flags.append(True)
        for a, b in equations:
            r = _int_row(a, -Q(b))
            rows += [r, tuple(-x for x in r)]
            flags += [False, False]
        return cls.space(n).add_rows(rows, flags)

    @classmethod
    def point(cls, p):
        p = [Q(x) for x in p]
        n = len(p)
        eqs = [(tuple(int(i == j) for j in range(n)), p[i]) for i in range(n)]
        return cls.from_constraints(n, equations=eqs)

    def add_rows(self, rows, flags):
        dd = self.dd.copy()
        out_rows = list(self.rows)
        out_flags = list(self.strict)
        for r, f in zip(rows, flags):
            if not any(r[:-1]):
                # constant row: c <= 0 or c < 0
                c = r[-1]
                if c > 0 or (c == 0 and f):
                    return HCell.empty(self.n)
                continue
            dd.add(r)
            out_rows.append(tuple(r))
            out_flags.append(bool(f))
        return HCell(self.n, tuple(out_rows), tuple(out_flags), dd)

    @classmethod
    def empty(cls, n):
        s_row = (0,) * n + (-1,)
        z_row = (0,) * n + (1,)
        dd = DD(n + 1)
        dd.add(s_row)
        dd.add(z_row)
        return cls(n, (s_row, z_row), (False, False), dd)

    # basic queries ---------------------------------------------------------

    def _gens(self):
        g = self._cache.get("gens")
        if g is None:
            verts, rays = [], []
            for v, m in self.dd.rays:
                if v[-1] > 0:
                    verts.append((v, m))
                else:
                    rays.append((v, m))
            g = self._cache["gens"] = (verts, rays)
        return g

    def is_empty(self):
        e = self._cache.get("empty")
        if e is None:
            verts, rays = self._gens()
            if not verts:
                e = True
            else:
                e = False
                allm = [m for _, m in verts] + [m for _, m in rays]
                for i, f in enumerate(self.strict):
                    if f:
                        b = 1 << i
                        if all(m & b for m in allm):
                            e = True
                            break
            self._cache["empty"] = e
        return e

    def is_bounded(self):
        verts, rays = self._gens()
        return not rays and not self.dd.lin

    def vertices(self):
        v = self._cache.get("verts")
        if v is None:
            verts, _ = self._gens()
            v = self._cache["verts"] = [tuple(mpq(x, g[-1]) for x in g[:-1]) for g, _ in verts]
        return v

    def contains(self, p):
        p = [Q(x) for x in p]
        for r, f in zip(self.rows, self.strict):
            val = sum((a * x for a, x in zip(r, p)), mpq(0)) + r[-1]
            if val > 0 or (f and val == 0):
                return False
        return True

    def witness(self):
        """A point of the cell (average of closure vertices plus rays)."""
        if self.is_empty():
            return None
        verts, rays = self._gens()
        pts = self.vertices()
        w = [sum((p[j] for p in pts), mpq(0)) / len(pts) for j in range(self.n)]
        for r, _ in rays:
            w = [w[j] + r[j] for j in range(self.n)]
        return tuple(w)

    def dim(self):
        if self.is_empty():
            return -1
        from .linalg import rank
        pts = self.vertices()
        _, rays = self._gens()
        dirs = [tuple(x - y for x, y in zip(p, pts[0])) for p in pts[1:]]
        dirs += [r[:-1] for r, _ in rays] + [l[:-1] for l in self.dd.lin]
        return rank(dirs) if dirs else 0

    def volume(self):
        """Lebesgue volume in R^n (tags ignored)."""
        v = self._cache.get("vol")
        if v is None:
            if self.is_empty():
                v = mpq(0)
            else:
                if not self.is_bounded():
                    raise ValueError("volume of an unbounded cell")
                verts, _ = self._gens()
                pts = self.vertices()
                v = triangulated_volume(pts, [m for _, m in verts], self.n)
            self._cache["vol"] = v
        return v

    def bbox(self):
        b = self._cache.get("bbox")
        if b is None:
            pts = self.vertices()
            if not pts:
                self._cache["bbox"] = None
                return None
            b = self._cache["bbox"] = (
                tuple(min(p[j] for p in pts) for j in range(self.n)),
                tuple(max(p[j] for p in pts) for j in range(self.n)))
        return b

    def sup(self, w):
        """Return ``(max of w.x over the closure, attained in the cell)``."""
        verts, rays = self._gens()
        w = [Q(x) for x in w]
        for r, _ in rays:
            if dot(w, r[:-1]) > 0:
                return None, False
        for l in self.dd.lin:
            if dot(w, l[:-1]) != 0:
                return None, False
        best = max(dot(w, p) for p in self.vertices())
        face = self.add_rows([_int_row([-x for x in w], best)], [False])
        return best, not face.is_empty()

    # transformations -------------------------------------------------------

    def pruned(self):
        """Drop rows that are strictly satisfied on the whole closure."""
        if self.is_empty():
            return HCell.empty(self.n)
        masks = [m for _, m in self.dd.rays]
        allm = 0
        for m in masks:
            allm |= m
        keep = []
        strict = []
        seen = {}
        for i in range(len(self.rows)):
            if i and not allm >> i & 1:
                continue
            j = seen.get(self.rows[i])
            if j is not None:
                strict[j] = strict[j] or self.strict[i]
                continue
            seen[self.rows[i]] = len(keep)
            keep.append(i)
            strict.append(self.strict[i])
        if len(keep) == len(self.rows):
            return self
        rays = []
        for v, m in self.dd.rays:
            nm = 0
            for j, i in enumerate(keep):
                if m >> i & 1:
                    nm |= 1 << j
            rays.append((v, nm))
        dd = DD(self.dd.dim, list(self.dd.lin), rays, len(keep))
        c = HCell(self.n, tuple(self.rows[i] for i in keep),
                  tuple(strict), dd)
        c._cache["empty"] = False
        return c

    def translate(self, t):
        t = [Q(x) for x in t]
        if all(x.denominator == 1 for x in t):
            ti = [int(x) for x in t]
            rows = tuple(r[:-1] + (r[-1] - sum(a * b for a, b in zip(r, ti)),) for r in self.rows)
            rays = [(tuple(v[j] + v[-1] * ti[j] for j in range(self.n)) + (v[-1],), m)
                    for v, m in self.dd.rays]
            lin = list(self.dd.lin)  # lineality has s = 0
            dd = DD(self.dd.dim, lin, rays, self.dd.nrows)
            c = HCell(self.n, rows, self.strict, dd)
            for k in ("empty",):
                if k in self._cache:
                    c._cache[k] = self._cache[k]
            if "vol" in self._cache:
                c._cache["vol"] = self._cache["vol"]
            return c
        rows = [_int_row(r[:-1], r[-1] - dot(r[:-1], t)) for r in self.rows[1:]]
        return HCell.space(self.n).add_rows(rows, self.strict[1:])

    def intersect(self, other):
        return self.add_rows(other.rows[1:], other.strict[1:])

    def subtract(self, other):
        """``self \\ other`` as a list of pairwise disjoint nonempty cells."""
        if self.is_empty():
            return []
        both = self.intersect(other)
        if both.is_empty():
            return [self]
        out = []
        cur = self
        for r, f in zip(other.rows[1:], other.strict[1:]):
            neg = tuple(-x for x in r)
            piece = cur.add_rows([neg], [not f])
            if not piece.is_empty():
                out.append(piece.pruned())
            cur = cur.add_rows([r], [f])
            if cur.is_empty():
                break
        return out

    def slice(self, origin, basis):
        """Preimage under ``c -> origin + sum c_i basis_i`` (a cell in R^k)."""
        k = len(basis)
        o = [Q(x) for x in origin]
        B = [[Q(x) for x in b] for b in basis]
        rows, flags = [], []
        for r, f in zip(self.rows[1:], self.strict[1:]):
            a = r[:-1]
            ac = [sum((a[j] * b[j] for j in range(self.n)), mpq(0)) for b in B]
            c0 = dot(a, o) + r[-1]
            rows.append(_int_row(ac, c0))
            flags.append(f)
        return HCell.space(k).add_rows(rows, flags)

    def constraints(self):
        """Yield ``(a, b, strict)`` for ``a.x <= b`` / ``a.x < b``."""
        for r, f in zip(self.rows[1:], self.strict[1:]):
            yield r[:-1], -r[-1], f

    def dump(self):
        parts = []
        for a, b, f in self.constraints():
            parts.append("%s·x <= %s [%s]" % (list(a), b, "strict" if f else "weak"))
        return "; ".join(parts)

    def __repr__(self):
        return "HCell(%s)" % self.dump()


# -- complexes -------------------------------------------------------------


class HComplex:
    """Finite union of pairwise disjoint half-open cells."""

    __slots__ = ("n", "cells")

    def __init__(self, n, cells=()):
        self.n = n
        self.cells = [c for c in cells if not c.is_empty()]

    def __iter__(self):
        return iter(self.cells)

    def __len__(self):
        return len(self.cells)

    def is_empty(self):
        return not self.cells

    def contains(self, p):
        return any(c.contains(p) for c in self.cells)

    def translate(self, t):
        return HComplex(self.n, [c.translate(t) for c in self.cells])

    def volume(self):
        return sum((c.volume() for c in self.cells), mpq(0))

    def dump(self):
        return "\n".join(c.dump() for c in self.cells)


def _as_cells(A):
    if isinstance(A, HCell):
        return [A]
    return list(A)


def cell_is_empty(c: HCell) -> bool:
    return c.is_empty()


def _bbox_disjoint(a, b):
    ba, bb = a.bbox(), b.bbox()
    if ba is None or bb is None:
        return True
    (alo, ahi), (blo, bhi) = ba, bb
    return any(ahi[j] < blo[j] or bhi[j] < alo[j] for j in range(len(alo)))


def cells_meet(A, B):
    """True iff the unions of the two cell lists intersect."""
    for a in A:
        for b in B:
            if a.is_bounded() and b.is_bounded() and _bbox_disjoint(a, b):
                continue
            if not a.intersect(b).is_empty():
                return True
    return False


def intersect(A, B) -> HComplex:
    A, B = _as_cells(A), _as_cells(B)
    n = A[0].n if A else (B[0].n if B else 0)
    out = []
    for a in A:
        for b in B:
            c = a.intersect(b)
            if not c.is_empty():
                out.append(c.pruned())
    return HComplex(n, out)


def subtract_cells(A, B):
    cur = list(A)
    for b in B:
        nxt = []
        for a in cur:
            if a.is_bounded() and b.is_bounded() and _bbox_disjoint(a, b):
                nxt.append(a)
            else:
                nxt.extend(a.subtract(b))
        cur = nxt
        if not cur:
            break
    return cur


def subtract(A, B) -> HComplex:
    A, B = _as_cells(A), _as_cells(B)
    n = A[0].n if A else 0
    return HComplex(n, subtract_cells(A, B))


def volume(A, basis=None):
    """Volume of a complex; with ``basis`` the cells are taken in the
    coordinates of that lattice basis (ambient cells are sliced first)."""
    cells = _as_cells(A)
    if basis is None:
        return sum((c.volume() for c in cells), mpq(0))
    n = cells[0].n if cells else 0
    if len(basis) == n:
        from .linalg import det
        d = abs(det([[Q(x) for x in b] for b in basis]))
        return sum((c.volume() for c in cells), mpq(0)) / d
    origin = (0,) * n
    return sum((c.slice(origin, basis).volume() for c in cells), mpq(0))


def slice_complex(A, origin, basis) -> HComplex:
    cells = [c.slice(origin, basis) for c in _as_cells(A)]
    return HComplex(len(basis), cells)


def contains_point(A, p) -> bool:
    return any(c.contains(p) for c in _as_cells(A))


def bounding_radius(gram, A):
    """Max of <v, v>_G over closure vertices of the cells."""
    best = mpq(0)
    for c in _as_cells(A):
        if c.is_empty():
            continue
        if not c.is_bounded():
            raise ValueError("unbounded cell")
        for v in c.vertices():
            r = dot(v, matvec(gram, v))
            if r > best:
                best = r
    return best


def verify_strict_tiling(pieces, target):
    """Check that ``pieces`` (a list of complexes) are pairwise disjoint and
    cover ``target`` exactly.  Returns ``(ok, witness)``."""
    plist = [_as_cells(p) for p in pieces]
    for i, j in combinations(range(len(plist)), 2):
        for a in plist[i]:
            for b in plist[j]:
                c = a.intersect(b)
                if not c.is_empty():
                    return False, c.witness()
    allp = [c for p in plist for c in p]
    rest = subtract_cells(_as_cells(target), allp)
    if rest:
        return False, rest[0].witness()
    extra = subtract_cells(allp, _as_cells(target))
    if extra:
        return False, extra[0].witness()
    return True, None


def half_open_box(lo, hi, closed_hi=False):
    """Half-open box ``prod [lo_i, hi_i)``."""
    n = len(lo)
    weak, strict = [], []
    for i in range(n):
        e = tuple(int(i == j) for j in range(n))
        weak.append((tuple(-x for x in e), -Q(lo[i])))
        (weak if closed_hi else strict).append((e, Q(hi[i])))
    return HCell.from_constraints(n, weak=weak, strict=strict)
