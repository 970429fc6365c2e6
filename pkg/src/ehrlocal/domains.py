"""Half-open fundamental domains of (sub)lattices.

A domain of a rank-k lattice L with basis B (rows) is kept in three forms:

* ``cell``: a k-dimensional cell in the coordinates of B (volume 1);
* ``strip``: the ambient cell ``T + span(L)^perp`` (only inequality rows,
  all of them vanish on the orthogonal complement of span L);
* ``ambient``: the domain itself as a lower-dimensional ambient cell.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from gmpy2 import mpq

from .halfopen import HCell, _int_row
from .linalg import (
    GeometryContext, Q, _canonical_basis, coordinates, dot, inverse,
    lex_positive, matmul, matvec, nullspace, primitive, projector, transpose,
)

__all__ = [
    "DomainPolicy", "FundamentalDomain", "voronoi_cell", "box_cell",
    "shift_cell", "domain_for",
]


@dataclass(frozen=True)
class DomainPolicy:
    """How to pick the fundamental domain of every induced sublattice.

    ``kind`` is ``"voronoi"`` or ``"box"``.  A nonzero ``shift`` (ambient
    rational vector) moves the domain of each sublattice L by the
    G-orthogonal projection of ``shift`` onto span(L).
    """

    kind: str = "voronoi"
    shift: tuple = None

    def __post_init__(self):
        if self.kind not in ("voronoi", "box"):
            raise ValueError("unknown domain kind %r" % (self.kind,))
        if self.shift is not None:
            s = tuple(Q(x) for x in self.shift)
            object.__setattr__(self, "shift", s if any(s) else None)

    @classmethod
    def shifted(cls, base, shift):
        return cls(base, tuple(shift))

    @property
    def name(self):
        if self.shift is None:
            return self.kind
        return "shifted(%s)" % self.kind

    @property
    def key(self):
        return (self.kind, self.shift)

    def restricted(self, ctx, basis, proj=None):
        """Policy for a sub-context whose lattice basis is ``basis``."""
        if self.shift is None:
            return self
        P = projector(ctx, basis)
        s = matvec(P, self.shift)
        c = coordinates(basis, s)
        return DomainPolicy(self.kind, tuple(c))


class FundamentalDomain:
    def __init__(self, ctx, basis, cell, strip, kind, shift=None):
        self.ctx = ctx
        self.basis = tuple(basis)
        self.cell = cell
        self.strip = strip
        self.kind = kind
        self.shift = shift

    @property
    def rank(self):
        return len(self.basis)

    @property
    def contains_zero(self):
        return self.cell.contains((0,) * self.rank)

    @property
    def ambient(self):
        n = self.ctx.n
        if not self.basis:
            return HCell.point((0,) * n)
        eqs = [(primitive(y), 0) for y in nullspace(self.basis)] if self.rank < n else []
        c = HCell.from_constraints(n, equations=eqs)
        return c.intersect(self.strip)

    def volume(self):
        """Volume in the coordinates of the lattice basis (should be 1)."""
        return self.cell.volume()

    def contains(self, x):
        return self.ambient.contains(x)

    def __repr__(self):
        return "FundamentalDomain(%s, basis=%r)" % (self.kind, self.basis)


def _size_reduce(basis, gram):
    """Pairwise size reduction until no basis norm decreases."""
    B = [tuple(Q(x) for x in b) for b in basis]

    def ip(u, v):
        return dot(u, matvec(gram, v))

    changed = True
    while changed:
        changed = False
        for i in range(len(B)):
            for j in range(len(B)):
                if i == j:
                    continue
                q = ip(B[i], B[j]) / ip(B[j], B[j])
                r = math.floor(q + mpq(1, 2))
                if r:
                    cand = tuple(a - r * b for a, b in zip(B[i], B[j]))
                    if ip(cand, cand) < ip(B[i], B[i]):
                        B[i] = cand
                        changed = True
    return B


def _isqrt_floor(x):
    x = Q(x)
    if x <= 0:
        return 0
    return math.isqrt(x.numerator // x.denominator)


def _short_vectors(H, bound):
    """Nonzero integer k with k^T H k <= bound."""
    k = len(H)
    Hinv = inverse(H)
    lims = [_isqrt_floor(bound * Hinv[i][i]) for i in range(k)]
    out = []

    def rec(i, pref):
        if i == k:
            if any(pref):
                v = tuple(pref)
                if dot(v, matvec(H, v)) <= bound:
                    out.append(v)
            return
        for z in range(-lims[i], lims[i] + 1):
            rec(i + 1, pref + [z])

    rec(0, [])
    return out


def _canon(ctx, L):
    """HNF-canonical basis (ambient vectors) of the sublattice generated by L."""
    L = [ctx.to_lattice_coords(tuple(Q(x) for x in v)) for v in L if any(v)]
    if not L:
        return ()
    if any(x.denominator != 1 for v in L for x in v):
        raise ValueError("domain generators must be lattice vectors")
    B = _canonical_basis([tuple(int(x) for x in v) for v in L], ctx.n)
    return tuple(tuple(Q(x) for x in ctx.from_lattice_coords(b)) for b in B)


def voronoi_cell(ctx: GeometryContext, L) -> FundamentalDomain:
    """Half-open Dirichlet-Voronoi cell of the lattice spanned by ``L``.

    A point tied between several nearest lattice points is kept by the
    lexicographically largest one: the bisector constraint of ``a`` is strict
    iff ``a`` is lex-positive in the coordinates of the canonical basis.
    """
    n = ctx.n
    B = _canon(ctx, L)
    k = len(B)
    if k == 0:
        return FundamentalDomain(ctx, (), HCell.space(0), HCell.space(n), "voronoi")
    G = ctx.gram
    R = _size_reduce(B, G)
    H = matmul(matmul(R, G), transpose(R))  # Gram of the reduced basis
    M = [coordinates(B, r) for r in R]  # reduced basis in canonical coordinates
    GB = matmul(matmul(B, G), transpose(B))
    bound = sum(H[i][i] for i in range(k))
    while True:
        entries = []  # (intrinsic row, ambient row, strict)
        for kv in _short_vectors(H, bound):
            ac = tuple(int(sum((kv[i] * M[i][j] for i in range(k)), mpq(0))) for j in range(k))
            norm = dot(ac, matvec(GB, ac))
            a_amb = tuple(sum((ac[i] * B[i][j] for i in range(k)), mpq(0)) for j in range(n))
            entries.append((_int_row(tuple(2 * x for x in matvec(GB, ac)), -norm),
                            _int_row(tuple(2 * x for x in matvec(G, a_amb)), -norm),
                            lex_positive(ac)))
        cell = HCell.space(k).add_rows([e[0] for e in entries], [e[2] for e in entries]).pruned()
        if cell.volume() == 1:
            break
        bound *= 4
    keep = set(cell.rows)
    kept = [e for e in entries if e[0] in keep]
    strip = HCell.space(n).add_rows([e[1] for e in kept], [e[2] for e in kept])
    return FundamentalDomain(ctx, B, cell, strip, "voronoi")


def box_cell(ctx: GeometryContext, L) -> FundamentalDomain:
    """Half-open parallelepiped {sum l_i b_i : 0 <= l_i < 1} on the canonical basis."""
    n = ctx.n
    B = _canon(ctx, L)
    k = len(B)
    if k == 0:
        return FundamentalDomain(ctx, (), HCell.space(0), HCell.space(n), "box")
    G = ctx.gram
    GB = matmul(matmul(B, G), transpose(B))
    U = matmul(inverse(GB), matmul(B, G))  # k x n, coordinates of the projection
    weak, strict, iw, ist = [], [], [], []
    for i in range(k):
        e = tuple(int(i == j) for j in range(k))
        iw.append((tuple(-x for x in e), 0))
        ist.append((e, 1))
        weak.append((tuple(-x for x in U[i]), 0))
        strict.append((U[i], 1))
    cell = HCell.from_constraints(k, weak=iw, strict=ist)
    strip = HCell.from_constraints(n, weak=weak, strict=strict)
    return FundamentalDomain(ctx, B, cell, strip, "box")


def shift_cell(D: FundamentalDomain, s) -> FundamentalDomain:
    """Translate the domain by ``s`` (an ambient vector in span L)."""
    s = tuple(Q(x) for x in s)
    if not any(s):
        return D
    if not D.basis:
        raise ValueError("cannot shift the domain of the trivial lattice")
    c = coordinates(D.basis, s)
    back = tuple(sum((ci * b[j] for ci, b in zip(c, D.basis)), mpq(0)) for j in range(len(s)))
    if back != s:
        raise ValueError("shift must lie in the span of the lattice")
    total = s if D.shift is None else tuple(a + b for a, b in zip(D.shift, s))
    return FundamentalDomain(D.ctx, D.basis, D.cell.translate(c), D.strip.translate(s),
                             D.kind, total)


_CACHE = {}


def domain_for(policy: DomainPolicy, ctx: GeometryContext, L) -> FundamentalDomain:
    """Domain of the sublattice spanned by ``L`` chosen by ``policy`` (memoized)."""
    B = _canon(ctx, L)
    key = (policy.key, ctx.key, B)
    D = _CACHE.get(key)
    if D is not None:
        return D
    D = (voronoi_cell if policy.kind == "voronoi" else box_cell)(ctx, B)
    if policy.shift is not None and B:
        P = projector(ctx, B)
        D = shift_cell(D, matvec(P, policy.shift))
    _CACHE[key] = D
    return D
