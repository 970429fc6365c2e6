from itertools import product

import pytest
from gmpy2 import mpq

from ehrlocal.domains import DomainPolicy, domain_for
from ehrlocal.halfopen import (
    HCell, HComplex, bounding_radius, contains_point, half_open_box, intersect,
    slice_complex, subtract, verify_strict_tiling, volume,
)
from ehrlocal.linalg import GeometryContext, identity

UNIT = half_open_box((0, 0), (1, 1))


def interval(lo, hi, lo_closed=True, hi_closed=False):
    weak, strict = [], []
    (weak if lo_closed else strict).append(((-1,), -mpq(lo)))
    (weak if hi_closed else strict).append(((1,), mpq(hi)))
    return HCell.from_constraints(1, weak=weak, strict=strict)


@pytest.mark.parametrize("weak, strict, empty", [
    ([((-1,), 0)], [((1,), 0)], True),            # x < 0 and x >= 0
    ([((1,), 1), ((-1,), -1)], [], False),        # x = 1
    ([((-1,), -1)], [((1,), 1)], True),           # 1 <= x < 1
])
def test_emptiness(weak, strict, empty):
    assert HCell.from_constraints(1, weak=weak, strict=strict).is_empty() is empty


def test_intersect():
    assert intersect([UNIT], [HCell.space(2)]).volume() == 1
    far = half_open_box((5, 5), (6, 6))
    assert intersect([UNIT], [far]).is_empty()
    both = intersect([UNIT], [half_open_box((mpq(1, 2), mpq(1, 2)), (mpq(3, 2), mpq(3, 2)))])
    assert both.volume() == mpq(1, 4)
    assert both.contains((mpq(1, 2), mpq(1, 2))) and not both.contains((1, mpq(3, 4)))


def test_subtract_intervals():
    assert subtract([interval(0, 2)], []).volume() == 2
    rest = subtract([interval(0, 2)], [interval(0, 1)])
    assert rest.volume() == 1
    assert rest.contains((1,)) and not rest.contains((mpq(1, 2),)) and not rest.contains((2,))


def test_subtracting_a_segment_changes_tags_not_volume():
    seg = HCell.from_constraints(2, weak=[((-1, 0), 0), ((1, 0), 1)], equations=[((0, 1), 0)])
    rest = subtract([UNIT], [seg])
    assert rest.volume() == 1
    assert not rest.contains((mpq(1, 2), 0)) and not rest.contains((0, 0))
    assert rest.contains((0, mpq(1, 2)))


def test_volumes():
    assert volume([UNIT]) == 1
    assert volume([half_open_box((0, 0, 0), (1, 1, 1))]) == 1
    tri = HCell.from_constraints(2, weak=[((-1, 0), 0), ((0, -1), 0), ((1, 1), 1)])
    assert volume([tri]) == mpq(1, 2)
    # in the coordinates of the basis (2,0),(0,1) the unit square has volume 1/2
    assert volume([UNIT], basis=((2, 0), (0, 1))) == mpq(1, 2)


def test_hexagonal_cell_volume():
    D = domain_for(DomainPolicy("voronoi"), GeometryContext(((2, 1), (1, 2))), identity(2))
    assert D.volume() == 1
    assert len(D.cell.vertices()) == 6


def test_slices():
    (edge,) = slice_complex([UNIT], (0, 0), [(1, 0)])
    assert edge.volume() == 1
    assert edge.contains((0,)) and not edge.contains((1,))
    inner = HCell.from_constraints(2, weak=[((-1, 0), 0)], strict=[((1, 0), 1), ((0, -1), 0), ((0, 1), 1)])
    assert slice_complex([inner], (0, 0), [(1, 0)]).is_empty()
    (same,) = slice_complex([UNIT], (0, 0), [(1, 0), (0, 1)])
    assert same.volume() == 1 and same.contains((0, 0)) and not same.contains((1, 0))


@pytest.mark.parametrize("p, inside", [
    ((0, 0), True), ((1, 0), False), ((mpq(1, 2), mpq(1, 2)), True), ((0, 1), False),
])
def test_membership(p, inside):
    assert contains_point([UNIT], p) is inside


def test_strict_tiling_of_an_interval():
    ok, w = verify_strict_tiling([[interval(0, 1)], [interval(1, 2)]], [interval(0, 2)])
    assert ok and w is None
    ok, w = verify_strict_tiling([[interval(0, 1, hi_closed=True)], [interval(1, 2)]],
                                 [interval(0, 2, hi_closed=True)])
    assert not ok and w == (1,)


def test_strict_tiling_failure_on_gap():
    ok, w = verify_strict_tiling([[interval(0, 1)], [interval(mpq(3, 2), 2)]], [interval(0, 2)])
    assert not ok and 1 <= w[0] < mpq(3, 2)


@pytest.mark.parametrize("gram", [identity(2), ((2, 1), (1, 2)), ((3, 1), (1, 1))])
def test_voronoi_translates_tile_a_box(gram):
    ctx = GeometryContext(gram)
    D = domain_for(DomainPolicy("voronoi"), ctx, identity(2))
    window = half_open_box((-1, -1), (1, 1))
    pieces = []
    for a in product(range(-3, 4), repeat=2):
        c = D.cell.translate(a).intersect(window)
        if not c.is_empty():
            pieces.append([c])
    ok, w = verify_strict_tiling(pieces, [window])
    assert ok, w


@pytest.mark.parametrize("cell, r2", [
    (UNIT, 2), (HCell.point((0, 0)), 0), (half_open_box((-1, -1), (1, 1)), 2),
])
def test_bounding_radius(cell, r2):
    assert bounding_radius(identity(2), [cell]) == r2


def test_complex_container():
    C = HComplex(2, [UNIT, UNIT.translate((1, 0))])
    assert len(C) == 2 and C.volume() == 2
    assert C.contains((1, 0)) and not C.contains((2, 0))
    assert C.translate((0, 1)).contains((0, 1))
