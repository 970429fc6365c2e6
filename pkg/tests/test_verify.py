from itertools import product

import pytest
from gmpy2 import mpq

from ehrlocal.domains import DomainPolicy
from ehrlocal.linalg import GeometryContext
from ehrlocal.mu import mu_table
from ehrlocal.polyhedra import Polytope, dual_description, normal_cone
from ehrlocal.verify import (
    EhrhartPolynomial, _tiling_pieces, count_points, covering_keys, ehrhart_interpolate,
    feasible_points, find_t0, random_polygons, valuation_probe, verify_lemma_volumes,
    verify_local_formula, verify_global_tiling,
)

STD2 = GeometryContext.standard(2)
STD3 = GeometryContext.standard(3)
HEX = GeometryContext(((2, 1), (1, 2)))
VOR = DomainPolicy("voronoi")
BOX = DomainPolicy("box")
SQUARE = Polytope([(0, 0), (1, 0), (1, 1), (0, 1)])
S = Polytope([(1, 0), (2, 1), (0, 2)])
CUBE = Polytope(list(product((0, 1), repeat=3)))


@pytest.mark.parametrize("ctx, P, t, count", [
    (STD2, SQUARE, 3, 16), (STD2, S, 1, 4), (STD3, CUBE, 2, 27), (STD2, S, 0, 1),
])
def test_count_points(ctx, P, t, count):
    assert count_points(ctx, P, t) == count


def test_ehrhart_interpolation():
    assert ehrhart_interpolate(STD2, SQUARE).coefficients == (1, 2, 1)
    assert ehrhart_interpolate(STD2, Polytope([(0, 0), (1, 0), (0, 1)])).coefficients \
        == (1, mpq(3, 2), mpq(1, 2))
    assert ehrhart_interpolate(STD3, CUBE).coefficients == (1, 3, 3, 1)
    E = ehrhart_interpolate(STD2, S)
    assert all(E(t) == count_points(STD2, S, t) for t in range(6))
    assert str(EhrhartPolynomial((1, mpq(3, 2), mpq(3, 2)))) == "3/2 t^2 + 3/2 t^1 + 1"


def test_feasible_points_of_vertices_and_body():
    lat = S.lattice
    for i, F in enumerate(lat.faces):
        if lat.dims[i] == 0:
            (v,) = [S.vertices[j] for j in F]
            assert feasible_points(STD2, VOR, S, i, 4) == [tuple(4 * x for x in v)]
    top = lat.dims.index(2)
    X = feasible_points(STD2, VOR, S, top, 4)
    assert len(X) <= count_points(STD2, S, 4)
    assert all(S.contains(tuple(mpq(x, 4) for x in p)) for p in X)


def test_feasible_counts_grow_with_t():
    lat = S.lattice
    for i in range(len(lat)):
        sizes = [len(feasible_points(STD2, VOR, S, i, t)) for t in (4, 5, 6)]
        assert sizes == sorted(sizes)


@pytest.mark.parametrize("policy", [VOR, BOX])
def test_tiling_square_and_triangle(policy):
    assert verify_global_tiling(STD2, policy, SQUARE, 3) == (True, None)
    assert verify_global_tiling(STD2, policy, S, 4) == (True, None)


def test_tiling_with_hexagonal_product_and_shift():
    assert verify_global_tiling(HEX, VOR, S, 4)[0]
    assert verify_global_tiling(STD2, DomainPolicy("voronoi", (mpq(1, 4), 0)), SQUARE, 3)[0]


def test_tiling_failure_reports_a_witness():
    # S itself (t = 1) is too small for the construction
    ok, witness = verify_global_tiling(STD2, VOR, S, 1)
    assert not ok
    assert witness == (mpq(1, 6), mpq(2, 3))
    assert find_t0(STD2, VOR, S) == 2


def test_tiling_rejects_t0():
    with pytest.raises(ValueError):
        verify_global_tiling(STD2, VOR, SQUARE, 0)


def test_tiling_is_stable_once_reached():
    t0 = find_t0(STD2, VOR, S)
    assert t0 is not None
    assert verify_global_tiling(STD2, VOR, S, t0 + 1)[0]


def test_tiling_pieces_inside_the_covering_complex_count_lattice_points():
    t = 4
    e, X, pieces = _tiling_pieces(STD2, VOR, S, t)
    # pieces in cells z + T with z in tP have total volume |tP cap Z^2|
    total = mpq(0)
    for z, plist in pieces.items():
        if S.contains(tuple(mpq(a, t) for a in z)):
            total += sum((c.volume() for _, cells in plist for c in cells), mpq(0))
    assert total == count_points(STD2, S, t)
    assert {z for z in pieces} <= covering_keys(e, S, t)


@pytest.mark.parametrize("P", [SQUARE, S])
def test_lemma_volumes(P):
    ok, failures = verify_lemma_volumes(STD2, VOR, P, 4)
    assert ok, failures


def test_edge_volume_identity_for_the_triangle():
    t = 4
    T = mu_table(STD2, VOR)
    lat = S.lattice
    for i in range(len(lat)):
        if lat.dims[i] != 1:
            continue
        C = normal_cone(STD2, S, i)
        s = len(feasible_points(STD2, VOR, S, i, t))
        for g in range(len(lat)):
            if lat.dims[g] == 0 and lat.leq(g, i):
                s += len(feasible_points(STD2, VOR, S, g, t)) * T.w(normal_cone(STD2, S, g), C)
        assert s == 4  # every edge of S is primitive, so vol(4f) = 4


@pytest.mark.parametrize("ctx, P", [
    (STD2, SQUARE), (STD2, S), (HEX, S), (STD3, CUBE),
])
def test_local_formula_matches_counting(ctx, P):
    ok, rep, E = verify_local_formula(ctx, VOR, P)
    assert ok and tuple(rep.coefficients) == E.coefficients


def test_valuation_probe():
    C = dual_description(2, generators=[(1, 0), (1, 1)])
    K = dual_description(2, generators=[(1, 1), (0, 1)])
    (same,) = valuation_probe(STD2, VOR, [(C, C)])
    assert same["discrepancy"] == 0
    (split,) = valuation_probe(STD2, VOR, [(C, K)])
    assert split["union"].rays == ((0, 1), (1, 0))
    assert split["intersection"].rays == ((1, 1),)
    assert isinstance(split["discrepancy"], type(mpq(0)))


def test_random_polygons_are_seeded():
    a = random_polygons(7, count=5)
    assert a == random_polygons(7, count=5)
    assert all(Polytope(p).dim == 2 for p in a)
