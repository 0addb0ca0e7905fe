import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hexsphere.builders import (ParallelogramParams, build_flat_torus, build_parallelogram_double,
                                build_triangle_double)
from hexsphere.cone_mesh import ConeSurface
from hexsphere.geodesics import (count_shortest_geodesics, distance, oracle_converged, oracle_distance,
                                 oracle_distances, propagate)
from hexsphere.holonomy import FaceChain, develop
from hexsphere.planar import cross, dist, sub

HEX = build_parallelogram_double(ParallelogramParams(2.0, 1.0, 0.3))
FIELD_A = propagate(HEX, HEX.marks["a"])
barys = st.tuples(st.floats(0.01, 1), st.floats(0.01, 1), st.floats(0.01, 1))


def torus_center():
    t = build_flat_torus()
    for f in range(t.n_faces):
        for s in range(3):
            if abs(t.lengths[f][s] - math.sqrt(2)) < 1e-12:
                a, b = t.side_points(f, s)
                return t, f, ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    raise AssertionError("no diagonal")


def random_points(surface, n, seed):
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(n):
        f = int(rng.integers(surface.n_faces))
        pts.append((f, surface.point_from_barycentric(f, rng.dirichlet([1, 1, 1]))))
    return pts


def test_torus_center_distance_and_count():
    t, f, c = torus_center()
    field = propagate(t, 0)
    assert abs(distance(field, f, c) - math.sqrt(2) / 2) < 1e-12
    assert count_shortest_geodesics(field, f, c) == 4


def test_torus_oracle_coarse():
    t, f, c = torus_center()
    assert abs(oracle_distance(t, 0, (f, c), 8) - math.sqrt(2) / 2) < 0.02 * math.sqrt(2) / 2


def test_triangle_oracle_coarse():
    assert abs(oracle_distance(build_triangle_double(1.0), 0, 1, 8) - 1.0) < 0.02


def test_oracle_refinement_is_monotone():
    targets = [HEX.marks[m] for m in "bcd"] + random_points(HEX, 10, 3)
    coarse = oracle_distances(HEX, HEX.marks["a"], targets, 8)
    fine = oracle_distances(HEX, HEX.marks["a"], targets, 16)
    assert all(y <= x + 1e-12 for x, y in zip(coarse, fine))


def test_distance_at_source_is_zero():
    for f, i in HEX.corners_of(HEX.marks["a"]):
        assert distance(FIELD_A, f, HEX.charts[f][i]) == 0.0


def test_every_face_has_an_image():
    assert all(len(imgs) >= 1 for imgs in FIELD_A.images)


def test_rejects_point_outside_face():
    with pytest.raises(ValueError):
        distance(FIELD_A, 0, (-5.0, -5.0))


def test_rejects_open_surface():
    open_surface = ConeSurface([(1.0, 1.0, 1.0), (1.0, 1.0, 1.0)], [(0, 0, 1, 0)])
    with pytest.raises(ValueError):
        propagate(open_surface, 0)
    with pytest.raises(KeyError):
        propagate(HEX, 99)


@pytest.mark.parametrize("params", [(1.0, 1.0, 0.0), (2.0, 1.0, 0.3)])
def test_matches_converged_oracle_at_random_points(params):
    s = build_parallelogram_double(ParallelogramParams(*params))
    field = propagate(s, s.marks["a"])
    pts = random_points(s, 100, 0)
    oracle, _ = oracle_converged(s, s.marks["a"], pts)
    for (f, p), o in zip(pts, oracle):
        d = distance(field, f, p)
        assert d <= o + 1e-9
        assert abs(d - o) <= 0.01 * o


@given(st.integers(0, 7), barys, barys)
def test_triangle_inequality_within_face(f, b1, b2):
    x = HEX.point_from_barycentric(f, [v / sum(b1) for v in b1])
    y = HEX.point_from_barycentric(f, [v / sum(b2) for v in b2])
    assert distance(FIELD_A, f, x) <= distance(FIELD_A, f, y) + dist(x, y) + 1e-9


def test_symmetry_between_fields():
    fb = propagate(HEX, HEX.marks["b"])
    assert abs(FIELD_A.vertex_distance(HEX.marks["b"]) - fb.vertex_distance(HEX.marks["a"])) < 1e-9


@given(st.floats(0.1, 10.0))
def test_scaling_equivariance(lam):
    scaled = propagate(HEX.scaled(lam), HEX.marks["a"])
    for m in "bcd":
        v = HEX.marks[m]
        assert math.isclose(scaled.vertex_distance(v), lam * FIELD_A.vertex_distance(v), rel_tol=1e-9)


def test_generic_point_has_one_geodesic():
    f, i = HEX.corners_of(HEX.marks["a"])[0]
    c = HEX.charts[f]
    x = tuple(0.9 * c[i][k] + 0.05 * c[(i + 1) % 3][k] + 0.05 * c[(i + 2) % 3][k] for k in range(2))
    assert count_shortest_geodesics(FIELD_A, f, x) == 1


def test_cut_locus_point_has_two_geodesics(twisted):
    edge = next(e for e in twisted.graph.edges if e.labels == ("a", "a"))
    face, p0, p1 = edge.polyline[len(edge.polyline) // 2]
    mid = ((p0[0] + p1[0]) / 2, (p0[1] + p1[1]) / 2)
    field = twisted.graph.fields["a"]
    assert count_shortest_geodesics(field, face, mid) >= 2


def test_witness_segments_avoid_vertices():
    for field in (FIELD_A, propagate(HEX, HEX.marks["b"])):
        for imgs in field.images:
            for img in imgs:
                if img.entry_side is None or not img.witness:
                    continue
                a, b = HEX.side_points(img.face, img.entry_side)
                t = 0.5 * (img.interval[0] + img.interval[1]) / HEX.lengths[img.face][img.entry_side]
                target = img.transform.inverse()((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
                src = HEX.charts[img.base[0]][img.base[1]]
                seg = sub(target, src)
                for k, (g, s) in enumerate(img.witness):
                    iso = develop(HEX, FaceChain(img.base[0], img.witness[:k]))
                    p, q = (iso(x) for x in HEX.side_points(g, s))
                    # crossing parameter along the side p -> q
                    u = cross(sub(p, src), seg) / cross(seg, sub(q, p))
                    assert 0.0 < u < 1.0
