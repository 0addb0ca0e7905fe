import math

from hypothesis import given
from hypothesis import strategies as st

from hexsphere.planar import (PlanarIsometry, dist, line_interval, merge_intervals, polygon_area,
                              subtract_interval, wrap_angle)

coord = st.floats(-10, 10, allow_nan=False)
angle = st.floats(-10, 10, allow_nan=False)
isometries = st.builds(PlanarIsometry, angle, coord, coord, st.sampled_from([1, -1]))
points = st.tuples(coord, coord)


@given(isometries, points, points)
def test_isometry_preserves_length(g, p, q):
    assert math.isclose(dist(g(p), g(q)), dist(p, q), rel_tol=1e-12, abs_tol=1e-11)


@given(isometries, isometries, isometries, points)
def test_composition_is_associative(f, g, h, p):
    a = ((f @ g) @ h)(p)
    b = (f @ (g @ h))(p)
    assert dist(a, b) < 1e-9


@given(isometries, points)
def test_inverse_undoes(g, p):
    assert dist(g.inverse()(g(p)), p) < 1e-9
    assert (g @ g.inverse()).close_to(PlanarIsometry.identity(), 1e-9)


@given(angle)
def test_wrap_angle_range(theta):
    w = wrap_angle(theta)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.cos(w), math.cos(theta), abs_tol=1e-12)


def test_rotation_fixes_center():
    g = PlanarIsometry.rotation(1.0, (2.0, -1.0))
    assert dist(g((2.0, -1.0)), (2.0, -1.0)) < 1e-15


def test_from_segments_maps_start_and_direction():
    g = PlanarIsometry.from_segments((0, 0), (1, 0), (1, 1), (1, 3))
    assert dist(g((0, 0)), (1, 1)) < 1e-15
    assert dist(g((2, 0)), (1, 3)) < 1e-15


def test_line_interval_square():
    square = [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert line_interval(square, (0.5, -1), (0, 1), 0.0) == (1.0, 2.0)
    assert line_interval(square, (2, 0), (0, 1), 0.0) is None


def test_polygon_area_orientation():
    tri = [(0, 0), (1, 0), (0, 1)]
    assert polygon_area(tri) == 0.5
    assert polygon_area(tri[::-1]) == -0.5


def test_interval_helpers():
    assert merge_intervals([(0, 1), (0.5, 2), (3, 4)]) == [(0, 2), (3, 4)]
    assert subtract_interval([(0, 4)], 1, 2) == [(0, 1), (2, 4)]
