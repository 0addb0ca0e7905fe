"""JSON, SVG and DOT output.

JSON floats are written with ``repr`` (shortest round-trip form), keys are
sorted, so equal inputs give byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .voronoi import CutLocusGraph, VoronoiPolygon

__all__ = ["dumps", "write_json", "read_json", "cell_svg", "gamma_dot", "PX_PER_UNIT"]

PX_PER_UNIT = 100.0
SVG_DIGITS = 4


def dumps(obj: Any) -> str:
    def fix(x):
        if isinstance(x, float) and not math.isfinite(x):
            return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
        if isinstance(x, dict):
            return {str(k): fix(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [fix(v) for v in x]
        return x

    return json.dumps(fix(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text())


def _num(x: float) -> str:
    s = f"{x:.{SVG_DIGITS}f}"
    if s.startswith("-") and float(s) == 0.0:
        s = s[1:]
    return s


def cell_svg(cell: VoronoiPolygon) -> str:
    """The cell in its sector: apex at the origin, first boundary ray on +x.

    Plane y points up; it is flipped once when writing SVG coordinates.
    """
    pts = [(0.0, 0.0)] + cell.planar_corners()
    xy = [(PX_PER_UNIT * x, -PX_PER_UNIT * y) for x, y in pts]
    pad = 10.0
    xs = [p[0] for p in xy]
    ys = [p[1] for p in xy]
    x0, y0 = min(xs) - pad, min(ys) - pad
    w, h = max(xs) - min(xs) + 2 * pad, max(ys) - min(ys) + 2 * pad
    poly = " ".join(f"{_num(x)},{_num(y)}" for x, y in xy)
    first, last = xy[1], xy[-1]
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_num(x0)} {_num(y0)} {_num(w)} {_num(h)}">',
        f"  <title>cell {cell.center}</title>",
        f'  <polygon points="{poly}" fill="#dde8f5" stroke="#1f3b63" stroke-width="1"/>',
        f'  <line x1="0.0000" y1="0.0000" x2="{_num(first[0])}" y2="{_num(first[1])}" stroke="#b03030" stroke-dasharray="4 2"/>',
        f'  <line x1="0.0000" y1="0.0000" x2="{_num(last[0])}" y2="{_num(last[1])}" stroke="#b03030" stroke-dasharray="4 2"/>',
        '  <circle cx="0.0000" cy="0.0000" r="3" fill="#1f3b63"/>',
        "</svg>",
    ]
    return "\n".join(lines) + "\n"


def gamma_dot(graph: CutLocusGraph) -> str:
    lines = ["graph Gamma {"]
    for i, v in enumerate(graph.vertices):
        name = v.mark if v.mark else f"v{i}"
        lines.append(f'  {i} [label="{name}"];')
    for e in graph.edges:
        lab = f"{e.length:.{SVG_DIGITS}f} {e.left.label}|{e.right.label}"
        lines.append(f'  {e.u} -- {e.v} [label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
