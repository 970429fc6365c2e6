"""Exact rational linear algebra and lattice helpers.

Vectors are tuples, matrices are tuples of row tuples.  Scalars are
``gmpy2.mpq`` (or plain ``int`` where integrality is guaranteed); both
compare and hash equal to ``fractions.Fraction``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from gmpy2 import mpq

__all__ = [
    "Q", "fmt", "dot", "vadd", "vsub", "vscale", "matvec", "matmul",
    "transpose", "identity", "det", "inverse", "solve", "rank", "nullspace",
    "primitive", "integer_row", "lex_positive", "GeometryContext", "inner",
    "hnf", "integer_kernel", "induced_lattice_basis", "orth_complement",
    "covolume", "projector", "coordinates",
]


def Q(x) -> mpq:
    """Coerce ints, strings like ``"3/4"``, Fractions and mpq to mpq."""
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(x.strip())
    if isinstance(x, float):
        raise TypeError("floating point input is not accepted: %r" % x)
    return mpq(x)


def fmt(x) -> str:
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), mpq(0))


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vscale(s, v):
    return tuple(s * a for a in v)


def matvec(M, v):
    return tuple(dot(row, v) for row in M)


def transpose(M):
    return tuple(zip(*M)) if M else ()


def matmul(A, B):
    Bt = transpose(B)
    return tuple(tuple(dot(row, col) for col in Bt) for row in A)


def identity(n):
    return tuple(tuple(mpq(int(i == j)) for j in range(n)) for i in range(n))


def _rref(M):
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    A = [[Q(x) for x in row] for row in M]
    pivots = []
    r = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rank(M) -> int:
    if not M:
        return 0
    return len(_rref(M)[1])


def det(M):
    n = len(M)
    if n == 0:
        return mpq(1)
    A = [[Q(x) for x in row] for row in M]
    d = mpq(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return mpq(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        inv = 1 / A[c][c]
        for i in range(c + 1, n):
            if A[i][c] != 0:
                f = A[i][c] * inv
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return d


def inverse(M):
    n = len(M)
    aug = [list(row) + [mpq(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    R, piv = _rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(row[n:]) for row in R)


def solve(M, b):
    """Solve M x = b (M square, nonsingular)."""
    return matvec(inverse(M), b)


def nullspace(M, n=None):
    """Rational basis of {x : M x = 0}; ``n`` gives the width when M is empty."""
    if not M:
        return [tuple(mpq(int(i == j)) for j in range(n)) for i in range(n)]
    width = len(M[0])
    R, piv = _rref(M)
    free = [c for c in range(width) if c not in piv]
    basis = []
    for f in free:
        v = [mpq(0)] * width
        v[f] = mpq(1)
        for row, p in zip(R, piv):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def primitive(v):
    """Positive multiple of a rational vector that is a primitive integer vector."""
    v = [Q(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def integer_row(v):
    """Like :func:`primitive`, used for constraint rows (sign preserved)."""
    return primitive(v)


def lex_positive(v) -> bool:
    for x in v:
        if x != 0:
            return x > 0
    return False


def _sign_normalize(v):
    return v if lex_positive(v) else tuple(-x for x in v)


# -- lattices --------------------------------------------------------------


def _ext_gcd(a, b):
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hnf(M):
    """Column Hermite normal form.

    Returns ``(H, U)`` with ``H = M U``, ``U`` unimodular and ``H`` lower
    triangular in column-echelon form: positive pivots, entries left of a
    pivot reduced into ``[0, pivot)``, trailing zero columns.
    """
    m = len(M)
    n = len(M[0]) if m else 0
    H = [[int(x) for x in row] for row in M]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(j, k, a, b, c, d):
        # (col_j, col_k) <- (a col_j + b col_k, c col_j + d col_k)
        for A in (H, U):
            for row in A:
                xj, xk = row[j], row[k]
                row[j] = a * xj + b * xk
                row[k] = c * xj + d * xk

    col = 0
    for i in range(m):
        if col >= n:
            break
        for k in range(col + 1, n):
            if H[i][k] == 0:
                continue
            a, b = H[i][col], H[i][k]
            g, x, y = _ext_gcd(a, b)
            colop(col, k, x, y, -b // g, a // g)
        if H[i][col] == 0:
            continue
        if H[i][col] < 0:
            for A in (H, U):
                for row in A:
                    row[col] = -row[col]
        p = H[i][col]
        for j in range(col):
            q = H[i][j] // p
            if q:
                for A in (H, U):
                    for row in A:
                        row[j] -= q * row[col]
        col += 1
    return tuple(map(tuple, H)), tuple(map(tuple, U))


def integer_kernel(A, n):
    """Saturated integer basis (as vectors) of {x in Z^n : A x = 0}."""
    if not A:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    H, U = hnf(A)
    r = sum(1 for j in range(n) if any(H[i][j] for i in range(len(H))))
    return [tuple(U[i][j] for i in range(n)) for j in range(r, n)]


def _canonical_basis(vectors, n):
    """HNF-canonical basis of the lattice spanned by integer ``vectors``."""
    if not vectors:
        return ()
    cols = transpose(vectors)  # n x k
    H, _ = hnf(cols)
    k = len(vectors)
    out = []
    for j in range(k):
        v = tuple(H[i][j] for i in range(n))
        if any(v):
            out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class GeometryContext:
    """Ambient space: Gram matrix ``gram`` and lattice basis ``basis`` (rows are
    the basis *vectors*, default the standard basis of Z^n)."""

    gram: tuple
    basis: tuple = None
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        g = tuple(tuple(Q(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if any(len(row) != n for row in g):
            raise ValueError("gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise ValueError("gram matrix must be symmetric")
        for k in range(1, n + 1):
            if det([row[:k] for row in g[:k]]) <= 0:
                raise ValueError("gram matrix must be positive definite")
        b = self.basis
        if b is None:
            b = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        b = tuple(tuple(Q(x) for x in row) for row in b)
        if len(b) != n or det(b) == 0:
            raise ValueError("lattice basis must be nonsingular")
        object.__setattr__(self, "basis", b)

    @classmethod
    def standard(cls, n, gram=None):
        if gram is None:
            gram = identity(n)
        return cls(gram)

    @property
    def n(self) -> int:
        return len(self.gram)

    @property
    def is_standard_lattice(self) -> bool:
        return self.basis == identity(self.n)

    @property
    def key(self):
        return (self.gram, self.basis)

    def to_lattice_coords(self, v):
        """Coordinates of an ambient vector w.r.t. the lattice basis."""
        if self.is_standard_lattice:
            return tuple(Q(x) for x in v)
        Bc = transpose(self.basis)
        return solve(Bc, tuple(Q(x) for x in v))

    def from_lattice_coords(self, c):
        return tuple(sum((ci * b[j] for ci, b in zip(c, self.basis)), mpq(0))
                     for j in range(self.n))

    def standardized(self) -> "GeometryContext":
        """Equivalent context on Z^n with Gram B^T G B."""
        if self.is_standard_lattice:
            return self
        Bc = transpose(self.basis)
        return GeometryContext(matmul(matmul(transpose(Bc), self.gram), Bc))

    def gram_int_covector(self, v):
        """Primitive integer covector proportional to G v (v nonzero)."""
        return primitive(matvec(self.gram, v))


def inner(ctx: GeometryContext, x, y):
    if len(x) != ctx.n or len(y) != ctx.n:
        raise ValueError("dimension mismatch")
    return dot(tuple(Q(a) for a in x), matvec(ctx.gram, tuple(Q(b) for b in y)))


def induced_lattice_basis(ctx: GeometryContext, S):
    """Basis of Lambda intersected with span(S), HNF-canonical, as ambient vectors."""
    n = ctx.n
    S = [ctx.to_lattice_coords(s) for s in S]
    S = [s for s in S if any(s)]
    if not S:
        return ()
    ann = nullspace(S)  # functionals vanishing on span S
    A = [primitive(a) for a in ann]
    ker = integer_kernel(A, n)
    basis = _canonical_basis(ker, n)
    return tuple(tuple(x for x in ctx.from_lattice_coords(b)) for b in basis) \
        if not ctx.is_standard_lattice else tuple(tuple(int(x) for x in b) for b in basis)


def orth_complement(ctx: GeometryContext, S):
    """Basis of {x : x^T G s = 0 for s in S} as primitive integer vectors."""
    rows = [matvec(ctx.gram, tuple(Q(x) for x in s)) for s in S if any(s)]
    if not rows:
        return [tuple(int(i == j) for j in range(ctx.n)) for i in range(ctx.n)]
    return [_sign_normalize(primitive(v)) for v in nullspace(rows)]


def covolume(ctx: GeometryContext, L):
    """Squared G-covolume det(L^T G L) of the lattice spanned by the vectors L."""
    L = [tuple(Q(x) for x in v) for v in L]
    if not L:
        return mpq(1)
    gl = tuple(tuple(inner(ctx, u, v) for v in L) for u in L)
    d = det(gl)
    if d == 0:
        raise ValueError("dependent vectors")
    return d


def projector(ctx: GeometryContext, L):
    """Matrix of the G-orthogonal projection onto span(L) (L independent)."""
    n = ctx.n
    if not L:
        return tuple(tuple(mpq(0) for _ in range(n)) for _ in range(n))
    B = tuple(tuple(Q(x) for x in v) for v in L)  # k x n, rows are vectors
    Bc = transpose(B)
    GB = matmul(ctx.gram, Bc)  # n x k
    M = inverse(matmul(B, GB))  # k x k
    # P = Bc M (G Bc)^T
    return matmul(matmul(Bc, M), transpose(GB))


def coordinates(basis, p):
    """Coefficients c with sum c_i basis_i = p, for p in span(basis)."""
    B = tuple(tuple(Q(x) for x in v) for v in basis)
    if not B:
        return ()
    gram = matmul(B, transpose(B))
    return matvec(inverse(gram), matvec(B, tuple(Q(x) for x in p)))


def box_points(bounds):
    """Integer points of a box given as [(lo, hi), ...] (inclusive)."""
    return product(*[range(lo, hi + 1) for lo, hi in bounds])
