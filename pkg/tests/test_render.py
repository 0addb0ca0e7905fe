import json
import math
from pathlib import Path

import pytest

from hexsphere.render import cell_svg, dumps, gamma_dot, read_json, write_json

GOLDEN = Path(__file__).parent / "golden"


def test_dumps_is_sorted_and_round_trips(tmp_path):
    obj = {"b": 0.1 + 0.2, "a": [1, 2.5e-17]}
    text = dumps(obj)
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == obj
    write_json(tmp_path / "x.json", obj)
    assert read_json(tmp_path / "x.json") == obj


def test_dumps_non_finite():
    assert json.loads(dumps([math.inf, -math.inf, math.nan])) == ["inf", "-inf", None]


@pytest.mark.parametrize("name", ["p2", "p3", "p4"])
def test_golden_drawings(name, untwisted, three_edge, twisted):
    inst = {"p2": untwisted, "p3": three_edge, "p4": twisted}[name]
    assert gamma_dot(inst.graph) == (GOLDEN / f"{name}_gamma.dot").read_text()
    for m in "ab":
        assert cell_svg(inst.cells[m]) == (GOLDEN / f"{name}_cell_{m}.svg").read_text()


def test_svg_apex_and_rays(twisted):
    svg = cell_svg(twisted.cells["a"])
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert '<circle cx="0.0000" cy="0.0000"' in svg
    assert svg.count("<line") == 2


def test_dot_lists_every_edge(twisted):
    dot = gamma_dot(twisted.graph)
    assert dot.count(" -- ") == twisted.graph.n_edges
    assert dot.count("[label=") == twisted.graph.n_vertices + twisted.graph.n_edges
