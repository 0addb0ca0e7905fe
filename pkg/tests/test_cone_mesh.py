import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hexsphere.builders import (ParallelogramParams, build_flat_torus, build_parallelogram_double,
                                build_triangle_double)
from hexsphere.cone_mesh import (ConeSurface, chart_from_lengths, cone_angle, gauss_bonnet_check,
                                 singular_locus, split_face, total_curvature_residual, validate)
from hexsphere.planar import dist

TWO_PI = 2 * math.pi
params = st.builds(
    lambda l2, ratio, frac: ParallelogramParams(ratio * l2, l2, frac * 2 * l2 * math.sin(math.pi / 3)),
    st.floats(0.5, 2.0), st.floats(1.0, 4.0), st.floats(0.0, 0.999),
)


def test_triangle_double_angles():
    s = build_triangle_double(1.0)
    assert s.n_vertices == 3
    for v in range(3):
        assert abs(cone_angle(s, v) - TWO_PI / 3) < 1e-12


def test_parallelogram_double_acute_and_obtuse_corners():
    s = build_parallelogram_double(ParallelogramParams(2.0, 1.0, 0.0))
    assert abs(cone_angle(s, s.marks["c"]) - TWO_PI / 3) < 1e-12
    assert abs(cone_angle(s, s.marks["a"]) - 2 * TWO_PI / 3) < 1e-12


def test_split_vertex_is_flat():
    s = split_face(build_triangle_double(1.0), 0)
    assert s.n_vertices == 4
    flat = [v for v in range(4) if abs(cone_angle(s, v) - TWO_PI) < 1e-12]
    assert len(flat) == 1
    assert validate(s) == []


def test_unknown_vertex():
    with pytest.raises(KeyError):
        cone_angle(build_triangle_double(1.0), 7)


def test_singular_locus_examples():
    hexs = singular_locus(build_parallelogram_double(ParallelogramParams(1.0, 1.0, 0.0)))
    assert sorted(round(r.cone_angle / (TWO_PI / 3), 12) for r in hexs) == [1, 1, 2, 2]
    assert [r.vertex for r in hexs] == sorted(r.vertex for r in hexs)
    tri = singular_locus(build_triangle_double(1.0))
    assert len(tri) == 3
    assert singular_locus(build_flat_torus()) == []


def test_curvature_report_is_exact():
    for r in singular_locus(build_triangle_double(2.0)):
        assert r.curvature == TWO_PI - r.cone_angle
        assert r.is_singular


def test_gauss_bonnet_whole_surfaces():
    assert gauss_bonnet_check(build_parallelogram_double(ParallelogramParams(1.0, 1.0, 0.0))) < 1e-12
    assert gauss_bonnet_check(build_triangle_double(1.0)) < 1e-12
    assert gauss_bonnet_check(build_flat_torus()) < 1e-12


def test_gauss_bonnet_single_faces():
    s = build_parallelogram_double(ParallelogramParams(2.0, 1.0, 0.3))
    for f in range(s.n_faces):
        assert gauss_bonnet_check(s, [f]) < 1e-12


def test_gauss_bonnet_rejects_bad_region():
    with pytest.raises(ValueError):
        gauss_bonnet_check(build_triangle_double(1.0), [5])


def test_validate_length_mismatch():
    s = ConeSurface([(1.0, 1.0, 1.0), (1.1, 1.0, 1.0)], [(0, 0, 1, 0), (0, 1, 1, 2), (0, 2, 1, 1)])
    kinds = [v.kind for v in validate(s)]
    assert kinds.count("length-mismatch") == 1


def test_validate_open_boundary():
    s = ConeSurface([(1.0, 1.0, 1.0), (1.0, 1.0, 1.0)], [(0, 0, 1, 0), (0, 1, 1, 2)])
    assert [v.kind for v in validate(s)] == ["open-boundary", "open-boundary"]


def test_validate_degenerate_face():
    s = ConeSurface([(1.0, 1.0, 2.0), (1.0, 1.0, 2.0)], [(0, 0, 1, 0), (0, 1, 1, 2), (0, 2, 1, 1)])
    assert "degenerate-face" in [v.kind for v in validate(s)]


@given(params)
def test_builder_output_is_valid(p):
    s = build_parallelogram_double(p)
    assert validate(s) == []
    assert s.euler_characteristic() == 2
    assert total_curvature_residual(s) < 1e-9


@given(params, st.integers(0, 7), st.tuples(st.floats(0.05, 1), st.floats(0.05, 1), st.floats(0.05, 1)))
def test_split_keeps_cone_angles(p, face, bary):
    s = build_parallelogram_double(p)
    t = split_face(s, face, bary)
    for m, v in s.marks.items():
        assert abs(cone_angle(t, t.marks[m]) - cone_angle(s, v)) < 1e-9
    assert total_curvature_residual(t) < 1e-9


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10))
def test_chart_reproduces_lengths(a, b, c):
    a, b, c = sorted((a, b, c))
    if a + b <= c * (1 + 1e-6):
        return
    p0, p1, p2 = chart_from_lengths(c, a, b)
    assert p0 == (0.0, 0.0) and p1[1] == 0.0 and p2[1] > 0
    assert math.isclose(dist(p1, p2), a, rel_tol=1e-9)
    assert math.isclose(dist(p2, p0), b, rel_tol=1e-9)


def test_json_round_trip():
    s = build_parallelogram_double(ParallelogramParams(2.0, 1.0, 0.3))
    t = ConeSurface.from_dict(s.to_dict())
    assert t.lengths == s.lengths and t.gluing == s.gluing and t.marks == s.marks
    assert t.vertex_of == s.vertex_of


def test_scaling_scales_area():
    s = build_triangle_double(1.0)
    assert math.isclose(s.scaled(2.0).area(), 4 * s.area(), rel_tol=1e-12)
