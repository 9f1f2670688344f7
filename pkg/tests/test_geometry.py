import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlphase.errors import DomainError, ParameterError, PreconditionError
from nlphase.geometry import (
    Ball,
    Box,
    BoxUnion,
    Cylinder,
    Grid,
    GridSet,
    HalfSpace,
    LatticeFamily,
    Slab,
    cell_fraction,
    census_approximation,
    census_counts,
    checkerboard,
    cube_census,
    face_mapping_bound,
    jump_area,
    measure,
    unit_ball_volume,
)

UNIT2 = Box((0.0, 0.0), (1.0, 1.0))


def test_measure_examples():
    assert measure(UNIT2) == 1.0
    assert measure(Cylinder(Box((0.0,), (1.0,)), 0.0, 0.5)) == 0.5
    assert measure(BoxUnion((UNIT2, Box((2.0, 0.0), (3.0, 1.0))))) == 2.0


def test_box_validation():
    with pytest.raises(ParameterError):
        Box((0.0, 1.0), (1.0, 1.0))
    with pytest.raises(PreconditionError):
        BoxUnion((UNIT2, Box((0.5, 0.5), (1.5, 1.5))))


def test_unit_ball_volume():
    assert unit_ball_volume(0) == 1.0
    assert unit_ball_volume(1) == 2.0
    assert unit_ball_volume(2) == math.pi
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-15)


boxes = st.tuples(
    st.floats(-5, 5), st.floats(-5, 5), st.floats(0.01, 3), st.floats(0.01, 3)
).map(lambda t: Box((t[0], t[1]), (t[0] + t[2], t[1] + t[3])))


@given(boxes, st.floats(0.01, 3))
def test_union_additivity(b, gap):
    shifted = b.translate((b.sides[0] + gap, 0.0))
    u = BoxUnion((b, shifted))
    assert u.measure == b.measure + shifted.measure


@given(boxes, boxes)
def test_intersection_measure_symmetric(p, q):
    assert p.overlap_measure(q) == pytest.approx(q.overlap_measure(p))
    assert 0 <= p.overlap_measure(q) <= min(p.measure, q.measure) + 1e-12


def test_cell_fraction_examples():
    below = HalfSpace.below(1, 0.0, 2)
    assert cell_fraction(below, Box.cube((0.3, 0.0), 0.2)) == pytest.approx(0.5)
    assert cell_fraction(UNIT2, Box.cube((0.5, 0.5), 0.2)) == pytest.approx(1.0)
    triangle = HalfSpace((-1.0, 1.0), 0.0)  # x2 < x1
    assert cell_fraction(triangle, Box((0.0, 0.0), (0.25, 0.25))) == pytest.approx(0.5, abs=1e-14)


def test_cell_fraction_gridset_domain():
    g = Grid.uniform(UNIT2, 8)
    s = GridSet.from_region(g, Box((0.0, 0.0), (1.0, 0.5)))
    assert cell_fraction(s, Box((0.0, 0.25), (0.5, 0.75))) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        cell_fraction(s, Box((0.5, 0.5), (1.5, 1.5)))


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-0.5, 0.5), st.floats(0.05, 0.5))
def test_halfspace_fraction_matches_sampling(nx, ny, c, side):
    if abs(nx) + abs(ny) < 0.1:
        return
    hs = HalfSpace((nx, ny), c)
    cube = Box.cube((0.1, -0.1), side)
    t = (np.arange(200) + 0.5) / 200 * side
    x, y = np.meshgrid(cube.lower[0] + t, cube.lower[1] + t, indexing="ij")
    sampled = hs.contains(np.stack([x.ravel(), y.ravel()], -1)).mean()
    assert cell_fraction(hs, cube) == pytest.approx(sampled, abs=0.02)


def test_census_threshold_validation():
    with pytest.raises(ParameterError):
        cube_census(UNIT2, LatticeFamily(0.125, 0, 2), 0.3, UNIT2)
    with pytest.raises(ParameterError):
        cube_census(UNIT2, LatticeFamily(0.125, 0, 2), 0.0, UNIT2)


@pytest.mark.parametrize("m", [4, 8, 16])
def test_census_aligned_halfspace(m):
    r = 1.0 / m
    # boundary on the faces of the shift-0 cubes, through centres of the e_N-shifted ones
    hs = HalfSpace.below(1, 0.5 + r / 2, 2)
    assert cube_census(hs, LatticeFamily(r, 0, 2), 0.1, UNIT2) == 0
    assert cube_census(hs, LatticeFamily(r, 2, 2), 0.1, UNIT2) == m - 1
    fr = [cell_fraction(hs, Box.cube((k * r, 0.5 + r / 2), r)) for k in range(1, m)]
    assert fr == pytest.approx([0.5] * (m - 1))


def test_census_full_set():
    assert census_counts(UNIT2, 0.125, 0.1, UNIT2) == [0, 0, 0]


def test_census_monotone_in_threshold():
    ball = Ball((0.5, 0.5), 0.3)
    counts = [cube_census(ball, LatticeFamily(1 / 32, 0, 2), a, UNIT2) for a in (0.01, 0.05, 0.1, 0.2, 0.24)]
    assert all(x >= y for x, y in zip(counts, counts[1:]))


def test_census_approximation_halfspace():
    r = 1 / 8
    ca = census_approximation(HalfSpace.below(1, 0.5 + r / 2, 2), r, 0.1, UNIT2)
    # lower rows are members; the window lattice spans [r/2, 1 - r/2] horizontally
    assert ca.interior_perimeter == pytest.approx(1 - r)
    assert ca.approx.measure == pytest.approx((1 - r) * 0.5)


def test_census_approximation_empty():
    g = Grid.uniform(UNIT2, 64)
    ca = census_approximation(GridSet.empty(g), 1 / 16, 0.1, UNIT2)
    assert ca.perimeter == 0.0
    assert ca.approx.measure == 0.0


def test_face_mapping_bound_on_random_gridsets():
    rng = np.random.default_rng(3)
    g = Grid.uniform(UNIT2, 64)
    for _ in range(10):
        s = GridSet(g, rng.random((64, 64)) < rng.uniform(0.1, 0.9))
        for r in (1 / 8, 1 / 16):
            ca = census_approximation(s, r, 0.1, UNIT2)
            assert ca.interior_perimeter <= face_mapping_bound(census_counts(s, r, 0.1, UNIT2), r, 2)


def test_census_approximation_converges_in_measure():
    ball = Ball((0.5, 0.5), 0.25)
    diffs = [census_approximation(ball, 2.0**-e, 0.1, UNIT2).symmetric_difference for e in range(3, 7)]
    assert all(x > y for x, y in zip(diffs, diffs[1:]))


def test_checkerboard_and_jump_area():
    g = Grid.uniform(UNIT2, 4)
    cb = checkerboard(g)
    assert cb.measure == 0.5
    assert jump_area(cb.mask, g) == pytest.approx(2 * 3 * 4 * 0.25)


def test_gridset_contains_and_mass():
    g = Grid(Box((0.0, 0.0), (2.0, 1.0)), (4, 2))
    s = GridSet.from_region(g, Box((0.0, 0.0), (1.0, 1.0)))
    assert s.measure == 1.0
    assert s.contains([[0.2, 0.2], [1.7, 0.5]]).tolist() == [True, False]
    assert s.box_mass(Box((0.25, 0.0), (1.25, 1.0))) == pytest.approx(0.75)


def test_slab_truncate_and_fraction():
    slab = Slab(-0.5, -0.1, 2)
    assert slab.measure == math.inf
    assert slab.truncate(2.0).measure == pytest.approx(4 * 0.4)
    assert cell_fraction(slab, Box.cube((0.0, -0.1), 0.2)) == pytest.approx(0.5)


@settings(max_examples=25)
@given(st.integers(2, 6), st.integers(0, 2))
def test_lattice_centers_inside_window(e, shift):
    fam = LatticeFamily(2.0**-e, shift, 2)
    c = fam.centers(UNIT2)
    r = fam.r
    assert np.all(c - r / 2 >= -1e-12) and np.all(c + r / 2 <= 1 + 1e-12)
