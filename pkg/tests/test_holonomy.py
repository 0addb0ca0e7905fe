import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hexsphere.builders import ParallelogramParams, build_flat_torus, build_parallelogram_double
from hexsphere.cone_mesh import split_face
from hexsphere.geodesics import propagate
from hexsphere.holonomy import (FaceChain, check_distance_identities, composite_holonomy, develop,
                                geodesic_composite_holonomy, loop_holonomy)

HEX = build_parallelogram_double(ParallelogramParams(2.0, 1.0, 0.3))
SQRT3 = math.sqrt(3)
twists = st.floats(0.01, 2 * math.sin(math.pi / 3) - 0.01)


def is_identity(iso, tol=1e-9):
    return all(abs(x - y) < tol for x, y in zip(iso((1.0, 0.0)) + iso((0.0, 1.0)), (1.0, 0.0, 0.0, 1.0)))


@pytest.mark.parametrize("mark,angle", [("a", 4 * math.pi / 3), ("b", 4 * math.pi / 3),
                                        ("c", 2 * math.pi / 3), ("d", 2 * math.pi / 3)])
def test_loop_rotation_angle(mark, angle):
    for base in range(HEX.n_faces):
        hol = loop_holonomy(HEX, HEX.marks[mark], base)
        assert hol.kind == "rotation"
        assert abs(hol.angle - angle) < 1e-9


def test_reverse_loop_inverts():
    for m in "abcd":
        fwd = loop_holonomy(HEX, HEX.marks[m], 2)
        back = loop_holonomy(HEX, HEX.marks[m], 2, reverse=True)
        assert is_identity(fwd.isometry @ back.isometry)


def test_regular_vertex_has_trivial_holonomy():
    s = split_face(HEX, 0)
    flat = next(v for v in range(s.n_vertices) if abs(s.cone_angle(v) - 2 * math.pi) < 1e-12)
    assert loop_holonomy(s, flat, 5).kind == "identity"


def test_torus_vertex_has_trivial_holonomy():
    t = build_flat_torus()
    assert loop_holonomy(t, 0, 0).kind == "identity"


def test_develop_empty_and_back_and_forth():
    assert is_identity(develop(HEX, FaceChain(3)))
    chain = FaceChain(3, ((3, 1),))
    assert is_identity(develop(HEX, chain + chain.reversed(HEX)))


def test_develop_rejects_unglued_side():
    with pytest.raises(ValueError):
        develop(HEX, FaceChain(0, ((0, 7),)))


def test_base_change_keeps_rotation_angle():
    v = HEX.marks["a"]
    angles = {round(loop_holonomy(HEX, v, f).angle, 9) for f in range(HEX.n_faces)}
    assert len(angles) == 1


@pytest.mark.parametrize("first,second", [("a", "c"), ("b", "d")])
def test_composite_is_translation_of_sqrt3_distance(first, second):
    hol, length, _ = geodesic_composite_holonomy(HEX, HEX.marks[first], HEX.marks[second])
    assert hol.kind == "translation"
    assert abs(hol.translation_length - SQRT3 * length) < 1e-6


def test_composite_length_survives_base_change():
    ref = composite_holonomy(HEX, HEX.marks["a"], HEX.marks["c"], 0).translation_length
    for f in range(1, HEX.n_faces):
        hol = composite_holonomy(HEX, HEX.marks["a"], HEX.marks["c"], f)
        assert abs(hol.translation_length - ref) < 1e-9


def test_composites_from_both_cells_agree():
    ac, _, _ = geodesic_composite_holonomy(HEX, HEX.marks["a"], HEX.marks["c"])
    bd, _, _ = geodesic_composite_holonomy(HEX, HEX.marks["b"], HEX.marks["d"])
    assert abs(ac.translation_length - bd.translation_length) < 1e-6


def test_unknown_vertex():
    with pytest.raises(KeyError):
        loop_holonomy(HEX, 42, 0)
    with pytest.raises(KeyError):
        composite_holonomy(HEX, HEX.marks["a"], 42, 0)


def test_distance_identities_untwisted():
    s = build_parallelogram_double(ParallelogramParams(2.0, 1.0, 0.0))
    assert max(check_distance_identities(s)) < 1e-9


@given(st.floats(1.0, 3.0), twists)
def test_distance_identities_hold_across_family(l1, t):
    s = build_parallelogram_double(ParallelogramParams(l1, 1.0, t))
    fields = {m: propagate(s, s.marks[m]) for m in "ab"}
    diam = max(max(fields["a"].vertex_distance(v) for v in range(s.n_vertices)), 1.0)
    assert max(check_distance_identities(s, fields)) < 1e-6 * diam


def test_distance_identities_need_marks():
    with pytest.raises(ValueError):
        check_distance_identities(build_flat_torus())
