import json
import math
from pathlib import Path

import pytest
from helpers import canonical_agreement
from hypothesis import given
from hypothesis import strategies as st

from hexsphere.builders import build_flat_torus
from hexsphere.classify import (GraphSummary, Multigraph, NotHexSphereError, canonical_form, catalog,
                                cells_isometric, classify, form_label, num_cond, structural_checks)
from hexsphere.cone_mesh import ConeSector
from hexsphere.voronoi import VoronoiPolygon

GOLDEN = Path(__file__).parent / "golden"


def summary(n, edges, p, q, marks=None, gaps=None):
    return GraphSummary(Multigraph.from_edges(n, edges), p, q,
                        tuple(marks or [None] * n), tuple(gaps or [1.0] * n), 1e-7)


def by_name(checks):
    return {c.name: c.passed for c in checks}


def test_canonical_form_ignores_labels():
    a = Multigraph.from_edges(4, [(0, 1), (0, 1), (0, 2), (1, 3)])
    b = Multigraph.from_edges(4, [(3, 2), (2, 3), (3, 0), (2, 1)])
    assert canonical_form(a) == canonical_form(b) == (4, ((0, 1), (0, 1), (0, 2), (1, 3)))


def test_canonical_form_keeps_loops_and_multiplicity():
    loop = Multigraph.from_edges(3, [(1, 1), (1, 0), (1, 2)])
    assert canonical_form(loop) == (3, ((0, 0), (0, 1), (0, 2)))
    assert canonical_form(Multigraph.from_edges(2, [(0, 1)])) != canonical_form(Multigraph.from_edges(2, [(0, 1)] * 2))


def test_form_label():
    assert form_label((2, ((0, 1), (0, 1)))) == "V2:0-1,0-1"


def test_canonical_form_limits():
    with pytest.raises(ValueError):
        canonical_form(Multigraph.from_edges(9, []))
    with pytest.raises(ValueError):
        Multigraph.from_edges(2, [(0, 2)])


def test_canonical_form_agrees_with_networkx():
    total, forms, bad = canonical_agreement(canonical_form)
    assert total > 1000 and forms > 100
    assert bad == 0


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=7),
    st.permutations(range(n)))))
def test_canonical_form_is_relabeling_invariant(data):
    n, edges, perm = data
    g = Multigraph.from_edges(n, edges)
    assert canonical_form(g) == canonical_form(g.relabel(perm))


@pytest.mark.parametrize("p,q,ok", [(2, 2, True), (3, 3, True), (4, 4, True), (2, 4, True),
                                    (2, 3, False), (4, 6, False), (1, 3, False), (5, 5, False)])
def test_num_cond(p, q, ok):
    assert num_cond(p, q) is ok


def test_structural_checks_on_double_edge():
    checks = by_name(structural_checks(summary(2, [(0, 1), (0, 1)], 2, 2, ["c", "d"])))
    assert all(checks.values())


def test_structural_checks_catch_parity():
    checks = by_name(structural_checks(summary(2, [(0, 1), (0, 1)], 2, 3, ["c", "d"])))
    assert not checks["num_cond"] and not checks["p_equals_q"]


def test_structural_checks_catch_too_many_edges():
    edges = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 4)]
    checks = by_name(structural_checks(summary(5, edges, 4, 6, ["c", None, None, "d", None])))
    assert not checks["num_cond"]


def test_structural_checks_catch_unmarked_low_degree():
    checks = by_name(structural_checks(summary(3, [(0, 1), (1, 2), (2, 0)], 3, 3, ["c", "d", None])))
    assert not checks["degree_bound"]
    assert checks["unique_cycle"]


def test_structural_checks_catch_two_cycles():
    checks = by_name(structural_checks(summary(2, [(0, 0), (0, 1), (1, 1)], 3, 3, ["c", "d"])))
    assert not checks["unique_cycle"]


def test_structural_checks_catch_equidistant_leaf():
    s = summary(3, [(0, 0), (0, 1), (0, 2)], 3, 3, [None, "c", "d"], [1.0, 0.0, 1.0])
    assert not by_name(structural_checks(s))["degree_one_not_equidistant"]


def test_untwisted_cells_are_isometric(untwisted):
    ok, res = cells_isometric(untwisted.cells["a"], untwisted.cells["b"], untwisted.graph.diameter)
    assert ok and res < 1e-9


def test_scaled_cell_is_not_isometric(twisted):
    cell = twisted.cells["b"]
    bigger = VoronoiPolygon(cell.center, cell.sector, tuple((1.1 * r, phi) for r, phi in cell.corners),
                            tuple(1.1 * x for x in cell.edge_lengths), cell.corner_angles,
                            cell.gamma_vertices, cell.gamma_edges)
    ok, res = cells_isometric(twisted.cells["a"], bigger, twisted.graph.diameter)
    assert not ok and res > 1e-3


def test_cells_with_other_apex_are_not_isometric(twisted):
    cell = twisted.cells["b"]
    other = VoronoiPolygon(cell.center, ConeSector(cell.sector.apex_angle + 0.01), cell.corners,
                           cell.edge_lengths, cell.corner_angles, cell.gamma_vertices, cell.gamma_edges)
    assert not cells_isometric(twisted.cells["a"], other)[0]


def test_mirrored_cell_is_isometric(twisted):
    cell = twisted.cells["a"]
    n = cell.n_edges
    # reversing the boundary: corner k keeps its angle, edges run the other way
    angles = (cell.corner_angles[0],) + tuple(reversed(cell.corner_angles[1:]))
    lengths = tuple(reversed(cell.edge_lengths))
    mirror = VoronoiPolygon(cell.center, cell.sector, cell.corners, lengths, angles,
                            cell.gamma_vertices, cell.gamma_edges)
    assert n == 4
    assert cells_isometric(cell, mirror, twisted.graph.diameter)[0]


def test_reports_pass_on_special_instances(untwisted, twisted, three_edge):
    assert [i.report.p for i in (untwisted, three_edge, twisted)] == [2, 3, 4]
    assert all(i.report.passed for i in (untwisted, twisted, three_edge))


def test_golden_class_forms(untwisted, three_edge, twisted):
    golden = json.loads((GOLDEN / "class_forms.json").read_text())
    for name, inst in (("p2", untwisted), ("p3", three_edge), ("p4", twisted)):
        g = golden[name]
        assert inst.report.form == (g["n_vertices"], tuple(tuple(e) for e in g["edges"]))
        assert (inst.report.p, inst.report.q) == (g["p"], g["q"])


def test_classify_rejects_non_hex_sphere():
    with pytest.raises(NotHexSphereError) as err:
        classify(build_flat_torus())
    assert err.value.problems


def test_catalog_of_nothing():
    cat = catalog([])
    assert cat.classes == [] and cat.n_reports == 0 and cat.pass_rate == 1.0


def test_catalog_matches_golden(sweep):
    cat = catalog([i.report for i in sweep])
    assert sum(c.count for c in cat.classes) == cat.n_passing
    golden = json.loads((GOLDEN / "catalog_seed2_200.json").read_text())
    assert cat.n_passing == golden["n_passing"]
    assert [c.label for c in cat.classes] == [c["label"] for c in golden["classes"]]
    assert [c.count for c in cat.classes] == [c["count"] for c in golden["classes"]]


def test_report_round_trips_through_json(twisted):
    d = json.loads(json.dumps(twisted.report.to_dict()))
    assert d["p"] == 4 and d["passed"] is True
    assert math.isclose(d["diameter"], twisted.report.diameter)
