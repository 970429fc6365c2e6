"""Acceptance criteria, one test per criterion.

Every test records a one-line verdict that is printed in the terminal
summary (see conftest.py), so a plain ``pytest`` run ends with a pass/fail
table.  Caches are cleared before each timed criterion so the timings
include all region construction.
"""
import json
import random
import time
from itertools import product
from pathlib import Path

import pytest
from gmpy2 import mpq

import ehrlocal.domains as domains_mod
import ehrlocal.mu as mu_mod
import ehrlocal.regions as regions_mod
from conftest import ACCEPTANCE
from ehrlocal.domains import DomainPolicy
from ehrlocal.halfopen import HCell, half_open_box, subtract_cells, verify_strict_tiling
from ehrlocal.linalg import GeometryContext, fmt
from ehrlocal.mu import gram_from_group, local_formula, mu, orbit_constancy
from ehrlocal.polyhedra import Polytope, normal_cone, relative_volume
from ehrlocal.regions import check_base_inclusion
from ehrlocal.verify import (
    find_t0, random_polygons, verify_lemma_volumes, verify_local_formula, verify_global_tiling,
)

DATA = Path(__file__).parent / "data"
STD2 = GeometryContext.standard(2)
STD3 = GeometryContext.standard(3)
HEX = GeometryContext(((2, 1), (1, 2)))
VOR = DomainPolicy("voronoi")
BOX = DomainPolicy("box")
SQUARE = Polytope([(0, 0), (1, 0), (1, 1), (0, 1)])
S = Polytope([(1, 0), (2, 1), (0, 2)])
ROT3 = ((0, 1), (-1, -1))
ETAS = (mpq(1, 8), mpq(1, 4), mpq(3, 8))
SOLIDS = {
    "unit cube": Polytope(list(product((0, 1), repeat=3))),
    "standard simplex": Polytope([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]),
    "Reeve tetrahedron": Polytope([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 3)]),
}

# every fundamental domain built while the criteria run, for criterion 9
SEEN_DOMAINS = {}


def fresh_caches():
    SEEN_DOMAINS.update(domains_mod._CACHE)
    regions_mod._ENGINES.clear()
    mu_mod._TABLES.clear()
    domains_mod._CACHE.clear()


def record(key, ok, detail):
    ACCEPTANCE[key] = (ok, detail)


def corpus():
    data = json.loads((DATA / "polygons.json").read_text())
    return data, [Polytope(p["vertices"]) for p in data["polygons"]]


def mus(rep, d):
    return sorted(rep.mu_by_dim(d))


def test_criterion_1_unit_square():
    fresh_caches()
    t = time.time()
    rep = local_formula(STD2, VOR, SQUARE)
    elapsed = time.time() - t
    got = ([mus(rep, 2), mus(rep, 1), mus(rep, 0)], list(reversed(rep.coefficients)))
    want = ([[1], [mpq(1, 2)] * 4, [mpq(1, 4)] * 4], [1, 2, 1])
    ok = got == want and elapsed < 10
    record("1", ok, "mu by dim (1, 1/2, 1/4), e = (1, 2, 1); %.2fs" % elapsed)
    assert got == want
    assert elapsed < 10


@pytest.mark.parametrize("eta", ETAS)
def test_criterion_2_shifted_square(eta):
    fresh_caches()
    t = time.time()
    rep = local_formula(STD2, DomainPolicy("voronoi", (eta, 0)), SQUARE)
    elapsed = time.time() - t
    half, quarter = mpq(1, 2), mpq(1, 4)
    want_edges = sorted([half + eta] * 2 + [half - eta] * 2)
    want_vertices = sorted([quarter + eta / 2] * 2 + [quarter - eta / 2] * 2)
    parts = {
        "edges": mus(rep, 1) == want_edges,
        "vertices": mus(rep, 0) == want_vertices,
        "coefficients": list(rep.coefficients) == [1, 2, 1],
        "time": elapsed < 30,
    }
    ok = all(parts.values())
    key = "2 (eta=%s)" % fmt(eta)
    prev = ACCEPTANCE.get("2")
    detail = "eta=%s edges %s (expected %s), vertices %s; %.2fs" % (
        fmt(eta), [fmt(x) for x in mus(rep, 1)], [fmt(x) for x in want_edges],
        "ok" if parts["vertices"] else "MISMATCH", elapsed)
    record(key, ok, detail)
    agg_ok = ok and (prev is None or prev[0])
    record("2", agg_ok, "see the per-eta lines")
    assert parts["coefficients"]
    assert parts["vertices"]
    assert parts["time"]
    assert mus(rep, 1) == want_edges


def test_criterion_3_triangle_standard_product():
    fresh_caches()
    t = time.time()
    rep = local_formula(STD2, VOR, S)
    elapsed = time.time() - t
    ok = (mus(rep, 1) == [mpq(1, 2)] * 3
          and mus(rep, 0) == [mpq(1, 4), mpq(3, 8), mpq(3, 8)]
          and list(reversed(rep.coefficients)) == [mpq(3, 2), mpq(3, 2), 1]
          and elapsed < 60)
    record("3", ok, "edges 1/2, vertices {3/8, 3/8, 1/4}, e = (3/2, 3/2, 1); %.2fs" % elapsed)
    assert ok


def test_criterion_4_triangle_hexagonal_product():
    fresh_caches()
    t = time.time()
    rep = local_formula(HEX, VOR, S)
    G = gram_from_group([ROT3])
    orbit_ok, orbits = orbit_constancy(GeometryContext(G), VOR, S, [ROT3])
    orbit_ok_hex, _ = orbit_constancy(HEX, VOR, S, [ROT3])
    elapsed = time.time() - t
    ok = ([mus(rep, 2), mus(rep, 1), mus(rep, 0)] == [[1], [mpq(1, 2)] * 3, [mpq(1, 3)] * 3]
          and orbit_ok and orbit_ok_hex and len(orbits) == 3 and elapsed < 60)
    record("4", ok, "mu by dim (1, 1/2, 1/3), three constant orbits; %.2fs" % elapsed)
    assert ok


@pytest.mark.parametrize("name, P, t", [("square", SQUARE, 3), ("triangle", S, 4)])
@pytest.mark.parametrize("policy", [VOR, BOX], ids=["voronoi", "box"])
def test_criterion_5_global_tiling(name, P, t, policy):
    fresh_caches()
    start = time.time()
    ok, witness = verify_global_tiling(STD2, policy, P, t)
    elapsed = time.time() - start
    key = "5 (%s, %s, t=%d)" % (name, policy.kind, t)
    record(key, ok and elapsed < 120,
           "tiling %s; %.2fs" % ("exact" if ok else "fails at %s" % (witness,), elapsed))
    prev = ACCEPTANCE.get("5")
    record("5", (prev is None or prev[0]) and ok and elapsed < 120, "see the per-case lines")
    assert ok, witness
    assert elapsed < 120


def test_criterion_6_corpus_local_formula():
    fresh_caches()
    data, polys = corpus()
    assert [tuple(tuple(v) for v in p["vertices"]) for p in data["polygons"]] == \
        random_polygons(data["seed"], count=25, bound=data["bound"])
    start = time.time()
    failures = []
    for p, P in zip(data["polygons"], polys):
        ok, rep, E = verify_local_formula(STD2, VOR, P)
        frozen = [mpq(c) for c in p["ehrhart"]]
        if not ok or list(reversed(E.coefficients)) != frozen:
            failures.append(P.vertices)
    for name, P in SOLIDS.items():
        ok, rep, E = verify_local_formula(STD3, VOR, P)
        if not ok:
            failures.append(name)
    elapsed = time.time() - start
    ok = not failures and elapsed < 1800
    record("6", ok, "25 polygons + 3 solids exact; %d failures; %.1fs" % (len(failures), elapsed))
    assert not failures
    assert elapsed < 1800


def _criterion_configs():
    _, polys = corpus()
    out = [("square", STD2, VOR, SQUARE)]
    out += [("shifted square eta=%s" % fmt(e), STD2, DomainPolicy("voronoi", (e, 0)), SQUARE)
            for e in ETAS]
    out += [("triangle", STD2, VOR, S), ("triangle hex", HEX, VOR, S),
            ("square box", STD2, BOX, SQUARE), ("triangle box", STD2, BOX, S)]
    out += [("polygon %d" % i, STD2, VOR, P) for i, P in enumerate(polys)]
    out += [(name, STD3, VOR, P) for name, P in SOLIDS.items()]
    return out


def test_criterion_7_lemma_oracles():
    fresh_caches()
    start = time.time()
    failures = []
    cones = 0
    for name, ctx, policy, P in _criterion_configs():
        t0 = find_t0(ctx, policy, P, t_max=8)
        if t0 is None:
            failures.append("%s: no tiling up to t=8" % name)
            continue
        ok, bad = verify_lemma_volumes(ctx, policy, P, t0)
        if not ok:
            failures.append("%s: volume identity fails at t=%d: %s" % (name, t0, bad[:2]))
        seen = set()
        for i in range(len(P.lattice)):
            N = normal_cone(ctx, P, i)
            for K in N.faces():
                if K.key in seen:
                    continue
                seen.add(K.key)
                cones += 1
                ok, w = check_base_inclusion(ctx, policy, K)
                if not ok:
                    failures.append("%s: base inclusion fails for %r at %s" % (name, K, w))
    elapsed = time.time() - start
    record("7", not failures, "volume identities and base inclusion on %d cones; %s; %.1fs"
           % (cones, "; ".join(failures[:3]) or "no failures", elapsed))
    assert not failures, failures


def test_criterion_8_known_coefficients():
    fresh_caches()
    _, polys = corpus()
    bad = []
    for P in polys + list(SOLIDS.values()):
        ctx = GeometryContext.standard(P.n)
        rep = local_formula(ctx, VOR, P)
        e = rep.coefficients
        d = P.dim
        facets = [i for i, k in enumerate(P.lattice.dims) if k == d - 1]
        half_facets = sum((relative_volume(ctx, P.face_points(i)) for i in facets), mpq(0)) / 2
        if not (e[0] == 1 and e[d] == P.volume() and e[d - 1] == half_facets):
            bad.append(P.vertices)
    record("8", not bad, "e_0 = 1, e_d = vol, e_(d-1) = half facet volume on %d polytopes"
           % (len(polys) + len(SOLIDS)))
    assert not bad, bad


def _domain_window_tiles(D):
    k = D.rank
    lo, hi = D.cell.bbox()
    window = half_open_box((-1,) * k, (1,) * k)
    ranges = [range(int(-1 - h) - 1, int(1 - l) + 2) for l, h in zip(lo, hi)]
    pieces = []
    for a in product(*ranges):
        c = D.cell.translate(a).intersect(window)
        if not c.is_empty():
            pieces.append([c])
    return verify_strict_tiling(pieces, [window])


def _random_cell(rng, n):
    weak, strict = [], []
    for i in range(n):
        e = tuple(int(i == j) for j in range(n))
        lo = mpq(rng.randint(-4, 2), 2)
        hi = lo + mpq(rng.randint(1, 4), 2)
        (strict if rng.random() < 0.5 else weak).append((tuple(-x for x in e), -lo))
        (strict if rng.random() < 0.5 else weak).append((e, hi))
    for _ in range(rng.randint(0, 2)):
        a = tuple(rng.randint(-3, 3) for _ in range(n))
        if any(a):
            (strict if rng.random() < 0.5 else weak).append((a, mpq(rng.randint(-4, 4), 2)))
    return HCell.from_constraints(n, weak=weak, strict=strict)


def test_criterion_9_property_suite():
    fresh_caches()
    # make sure the domains of every earlier configuration are present
    for name, ctx, policy, P in _criterion_configs()[:8]:
        local_formula(ctx, policy, P)
    fresh_caches()
    domain_failures = []
    checked = 0
    for key, D in sorted(SEEN_DOMAINS.items(), key=repr):
        if D.rank == 0:
            continue
        checked += 1
        if D.volume() != 1:
            domain_failures.append((key, "volume %s" % D.volume()))
            continue
        ok, w = _domain_window_tiles(D)
        if not ok:
            domain_failures.append((key, w))
    rng = random.Random(20240607)
    probes = discrepancies = 0
    while probes < 12000:
        n = rng.choice((2, 3))
        A, B = _random_cell(rng, n), _random_cell(rng, n)
        inter = A.intersect(B)
        diff = subtract_cells([A], [B])
        for _ in range(60):
            p = tuple(mpq(rng.randint(-12, 12), 4) for _ in range(n))
            a, b = A.contains(p), B.contains(p)
            hits = sum(1 for c in diff if c.contains(p))
            if inter.contains(p) != (a and b) or hits != (1 if a and not b else 0):
                discrepancies += 1
            probes += 1
    ok = not domain_failures and checked > 0 and discrepancies == 0
    record("9", ok, "%d domains with volume 1 and exact window tilings; %d membership probes, "
           "%d discrepancies" % (checked, probes, discrepancies))
    assert not domain_failures, domain_failures[:3]
    assert checked > 0
    assert discrepancies == 0


def test_four_dimensional_smoke():
    # not an acceptance gate: mu of the vertex cone of the unit 4-cube
    fresh_caches()
    ctx = GeometryContext.standard(4)
    from ehrlocal.polyhedra import dual_description
    C = dual_description(4, generators=[tuple(-int(i == j) for j in range(4)) for i in range(4)])
    start = time.time()
    value = mu(ctx, VOR, C)
    elapsed = time.time() - start
    record("4d-smoke", value == mpq(1, 16), "vertex cone of the 4-cube: mu = %s; %.1fs (non-blocking)"
           % (fmt(value), elapsed))
    assert value == mpq(1, 16)
