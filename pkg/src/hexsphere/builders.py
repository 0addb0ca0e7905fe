"""Constructions of example surfaces.

The main family is the double of a perfect parallelogram (interior angles
pi/3 and 2*pi/3), optionally twisted along the closed geodesic obtained by
doubling a segment perpendicular to the two longest sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .cone_mesh import ConeSurface, singular_locus, validate
from .planar import TWO_PI, Point, dist, polygon_area
from .tolerances import EPS_LEN

__all__ = [
    "ParallelogramParams",
    "GluingPattern",
    "GluingError",
    "build_parallelogram_double",
    "build_triangle_double",
    "build_flat_torus",
    "build_from_gluing",
    "double_pattern",
    "sample_family",
    "assign_hex_marks",
    "hex_sphere_problems",
]

SIN60 = math.sqrt(3.0) / 2.0


class GluingError(ValueError):
    """Raised when a gluing pattern cannot produce a closed oriented surface."""


@dataclass(frozen=True)
class ParallelogramParams:
    """Perfect parallelogram with sides ``l1 >= l2`` and a twist length.

    The twist is measured along the closed geodesic of length ``2 * h`` with
    ``h = l2 * sin(pi / 3)``.
    """

    l1: float
    l2: float
    twist: float = 0.0

    @property
    def height(self) -> float:
        return self.l2 * SIN60

    @property
    def gamma_length(self) -> float:
        return 2.0 * self.height

    def check(self) -> None:
        if not (self.l1 > 0 and self.l2 > 0 and math.isfinite(self.l1) and math.isfinite(self.l2)):
            raise ValueError(f"side lengths must be positive, got l1={self.l1!r}, l2={self.l2!r}")
        if self.l2 > self.l1:
            raise ValueError(f"parameter order: need l1 >= l2, got l1={self.l1!r} < l2={self.l2!r}")
        if not 0.0 <= self.twist < self.gamma_length:
            raise ValueError(f"twist must lie in [0, {self.gamma_length!r}), got {self.twist!r}")

    def to_dict(self) -> dict:
        return {"l1": self.l1, "l2": self.l2, "twist": self.twist}

    @classmethod
    def from_dict(cls, data: Mapping) -> "ParallelogramParams":
        return cls(float(data["l1"]), float(data["l2"]), float(data.get("twist", 0.0)))


@dataclass(frozen=True)
class GluingPattern:
    """Planar polygons with their edges identified in pairs.

    Polygons are counterclockwise vertex lists; edge ``i`` runs from vertex
    ``i`` to vertex ``i + 1``. A pairing ``(pa, ea, pb, eb, reverse)`` glues
    edge ``ea`` of polygon ``pa`` to edge ``eb`` of polygon ``pb``; ``reverse``
    must be true (start of one edge to the end of the other), otherwise the
    quotient is not oriented. ``marks`` names polygon vertices.
    """

    polygons: tuple[tuple[Point, ...], ...]
    pairing: tuple[tuple[int, int, int, int, bool], ...]
    marks: Mapping[str, tuple[int, int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "polygons": [[list(p) for p in poly] for poly in self.polygons],
            "pairing": [[pa, ea, pb, eb, bool(rev)] for pa, ea, pb, eb, rev in self.pairing],
            "marks": {k: list(self.marks[k]) for k in sorted(self.marks)},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "GluingPattern":
        polys = tuple(tuple((float(x), float(y)) for x, y in poly) for poly in data["polygons"])
        pairing = tuple(
            (int(p[0]), int(p[1]), int(p[2]), int(p[3]), bool(p[4]) if len(p) > 4 else True)
            for p in data["pairing"]
        )
        marks = {k: (int(v[0]), int(v[1])) for k, v in data.get("marks", {}).items()}
        return cls(polys, pairing, marks)


def _fan_side(n: int, edge: int) -> tuple[int, int]:
    """(triangle, side) of polygon edge ``edge`` in the fan from vertex 0."""
    if edge == 0:
        return 0, 0
    if edge == n - 1:
        return n - 3, 2
    return edge - 1, 1


def _fan_corner(n: int, vertex: int) -> tuple[int, int]:
    if vertex == 0:
        return 0, 0
    if vertex == n - 1:
        return n - 3, 2
    return vertex - 1, 1


def build_from_gluing(pattern: GluingPattern) -> ConeSurface:
    """Fan-triangulate every polygon from its vertex 0 and glue per the pairing."""
    charts: list[tuple[Point, Point, Point]] = []
    offsets = []
    for k, poly in enumerate(pattern.polygons):
        n = len(poly)
        if n < 3:
            raise GluingError(f"polygon {k} has fewer than 3 vertices")
        if polygon_area(poly) <= 0:
            raise GluingError(f"polygon {k} is not counterclockwise")
        offsets.append(len(charts))
        for j in range(n - 2):
            charts.append((poly[0], poly[j + 1], poly[j + 2]))
    gluing = []
    for k, poly in enumerate(pattern.polygons):
        for j in range(len(poly) - 3):
            gluing.append((offsets[k] + j, 2, offsets[k] + j + 1, 0))
    seen: set[tuple[int, int]] = set()
    for pa, ea, pb, eb, reverse in pattern.pairing:
        for p, e in ((pa, ea), (pb, eb)):
            if not (0 <= p < len(pattern.polygons) and 0 <= e < len(pattern.polygons[p])):
                raise GluingError(f"edge {(p, e)} does not exist")
            if (p, e) in seen:
                raise GluingError(f"non-manifold identification: edge {(p, e)} paired twice")
            seen.add((p, e))
        if (pa, ea) == (pb, eb):
            raise GluingError(f"non-manifold identification: edge {(pa, ea)} glued to itself")
        if not reverse:
            raise GluingError(f"non-orientable result: pair {(pa, ea, pb, eb)} keeps orientation")
        la = _edge_length(pattern.polygons[pa], ea)
        lb = _edge_length(pattern.polygons[pb], eb)
        if abs(la - lb) > EPS_LEN * max(la, lb):
            raise GluingError(f"length mismatch between edges {(pa, ea)} and {(pb, eb)}: {la!r} vs {lb!r}")
        ta, sa = _fan_side(len(pattern.polygons[pa]), ea)
        tb, sb = _fan_side(len(pattern.polygons[pb]), eb)
        gluing.append((offsets[pa] + ta, sa, offsets[pb] + tb, sb))
    total = sum(len(p) for p in pattern.polygons)
    if len(seen) != total:
        missing = [(k, e) for k, p in enumerate(pattern.polygons) for e in range(len(p)) if (k, e) not in seen]
        raise GluingError(f"unpaired polygon edges: {missing}")
    surface = ConeSurface.from_charts(charts, gluing)
    marks = {}
    for name, (p, v) in pattern.marks.items():
        t, c = _fan_corner(len(pattern.polygons[p]), v)
        marks[name] = surface.vertex_of[offsets[p] + t][c]
    surface = surface.with_marks(marks)
    bad = [v for v in validate(surface) if v.kind != "length-mismatch"]
    if bad:
        raise GluingError("; ".join(f"{v.kind}: {v.detail}" for v in bad))
    return surface


def _edge_length(poly: Sequence[Point], e: int) -> float:
    return dist(poly[e], poly[(e + 1) % len(poly)])


def _mirror_reverse(poly: Sequence[Point]) -> list[Point]:
    n = len(poly)
    return [(-poly[(-i) % n][0], poly[(-i) % n][1]) for i in range(n)]


def double_pattern(poly: Sequence[Point]) -> GluingPattern:
    """Two copies of a convex polygon glued edge to edge."""
    n = len(poly)
    back = _mirror_reverse(poly)
    pairing = tuple((0, i, 1, (n - i - 1) % n, True) for i in range(n))
    return GluingPattern((tuple(poly), tuple(back)), pairing)


def build_triangle_double(side: float) -> ConeSurface:
    if not side > 0:
        raise ValueError(f"side must be positive, got {side!r}")
    tri = [(0.0, 0.0), (side, 0.0), (0.5 * side, SIN60 * side)]
    return build_from_gluing(double_pattern(tri))


def build_flat_torus(u: Point = (1.0, 0.0), v: Point = (0.0, 1.0)) -> ConeSurface:
    """Parallelogram spanned by ``u`` and ``v`` with opposite sides identified."""
    quad = ((0.0, 0.0), u, (u[0] + v[0], u[1] + v[1]), v)
    pattern = GluingPattern((quad,), ((0, 0, 0, 2, True), (0, 1, 0, 3, True)))
    return build_from_gluing(pattern)


def _half_polygon(params: ParallelogramParams, right: bool, top: bool, cut: float):
    """One half of the double, unfolded across its bottom or top fold into a hexagon.

    The half lies on one side of the vertical segment ``x = x0`` that doubles
    to the closed geodesic. Arc length ``s`` on that geodesic runs up the
    front copy (``s = y``) and down the back copy. Unfolding across the
    bottom edge leaves the geodesic's polygon vertex at ``s = h``; unfolding
    across the top leaves it at ``s = 0``. ``cut`` is the arc position of the
    extra vertex where the other half's vertex lands. Returns the polygon,
    the two internal fold pairings and the edge indices of the two geodesic
    pieces (the one leaving the polygon vertex first, in increasing ``s``
    for the left half and decreasing ``s`` for the right half).
    """
    l1, a2, h = params.l1, 0.5 * params.l2, params.height
    x0 = 0.5 * (a2 + l1)
    period = 2.0 * h
    if top:
        g = (x0, cut)
    else:
        g = (x0, cut if cut <= h else cut - period)
    if not right and not top:
        poly = [(0.0, 0.0), (a2, -h), (x0, -h), g, (x0, h), (a2, h)]
        folds, gamma = [(5, 0), (4, 1)], (2, 3)
    elif not right:
        poly = [(a2, h), (0.0, 0.0), (x0, 0.0), g, (x0, period), (0.0, period)]
        folds, gamma = [(0, 5), (1, 4)], (2, 3)
    elif not top:
        poly = [(l1, 0.0), (l1 + a2, h), (x0, h), g, (x0, -h), (l1 + a2, -h)]
        folds, gamma = [(0, 5), (1, 4)], (2, 3)
    else:
        poly = [(l1, 0.0), (l1 + a2, h), (l1, period), (x0, period), g, (x0, 0.0)]
        folds, gamma = [(0, 1), (2, 5)], (3, 4)
    return poly, folds, gamma


def _parallelogram_pattern(params: ParallelogramParams) -> GluingPattern:
    """Two hexagons glued along the closed geodesic with offset ``twist``.

    Left arc ``s`` is glued to right arc ``s + twist``. Each half keeps one
    vertex on the geodesic; the fold used for each unfolding is chosen so the
    two vertices land at least ``h / 2`` apart, which keeps every edge long.
    """
    h = params.height
    period = 2.0 * h
    t = params.twist % period
    best = None
    for v_left in (h, 0.0):
        for v_right in (h, 0.0):
            g = (v_right - t - v_left) % period
            gap = min(g, period - g)
            if best is None or gap > best[0] + 1e-12 * h:
                best = (gap, v_left, v_right)
    _, v_left, v_right = best
    w_left = (v_right - t) % period
    w_right = (v_left + t) % period
    left, lfolds, lgamma = _half_polygon(params, False, v_left == 0.0, w_left)
    right, rfolds, rgamma = _half_polygon(params, True, v_right == 0.0, w_right)
    pairing = [(0, i, 0, j, True) for i, j in lfolds] + [(1, i, 1, j, True) for i, j in rfolds]
    pairing += [(0, lgamma[0], 1, rgamma[0], True), (0, lgamma[1], 1, rgamma[1], True)]
    return GluingPattern((tuple(left), tuple(right)), tuple(pairing))


def build_parallelogram_double(params: ParallelogramParams) -> ConeSurface:
    """Twisted double of a perfect parallelogram, marked ``a, b`` (4pi/3) and ``c, d`` (2pi/3)."""
    params.check()
    surface = build_from_gluing(_parallelogram_pattern(params))
    return assign_hex_marks(surface)


def assign_hex_marks(surface: ConeSurface) -> ConeSurface:
    """Mark the 4pi/3 cone points ``a, b`` and the 2pi/3 ones ``c, d`` by vertex id."""
    big, small = [], []
    for rep in singular_locus(surface):
        if abs(rep.cone_angle - 4 * math.pi / 3) <= 1e-6:
            big.append(rep.vertex)
        elif abs(rep.cone_angle - 2 * math.pi / 3) <= 1e-6:
            small.append(rep.vertex)
    if len(big) != 2 or len(small) != 2:
        raise ValueError(f"not a hex sphere: cone angles {[r.cone_angle for r in singular_locus(surface)]}")
    return surface.with_marks({"a": big[0], "b": big[1], "c": small[0], "d": small[1]})


def hex_sphere_problems(surface: ConeSurface) -> list[str]:
    """Reasons why ``surface`` is not a marked hex sphere (empty if it is one)."""
    problems = [f"{v.kind}: {v.detail}" for v in validate(surface)]
    if problems:
        return problems
    chi = surface.euler_characteristic()
    if chi != 2:
        problems.append(f"not a sphere: Euler characteristic {chi}")
    sing = singular_locus(surface)
    if len(sing) != 4:
        problems.append(f"expected 4 cone points, found {len(sing)}")
    unit = TWO_PI / 3
    for rep in sing:
        k = round(rep.cone_angle / unit)
        if abs(rep.cone_angle - k * unit) > 1e-6 or k not in (1, 2):
            problems.append(f"vertex {rep.vertex} has cone angle {rep.cone_angle!r}")
    expected = {"a": 2 * unit, "b": 2 * unit, "c": unit, "d": unit}
    for name, angle in expected.items():
        v = surface.marks.get(name)
        if v is None:
            problems.append(f"mark {name!r} missing")
        elif abs(surface.cone_angle(v) - angle) > 1e-6:
            problems.append(f"mark {name!r} sits on a vertex of angle {surface.cone_angle(v)!r}")
    if len({surface.marks.get(k) for k in expected}) != 4 and not any("missing" in p for p in problems):
        problems.append("marks are not distinct")
    return problems


def sample_family(seed: int, count: int) -> list[ParallelogramParams]:
    """Reproducible random parameters: l2 in [0.5, 2], l1/l2 in [1, 4], twist in [0, 2h)."""
    if count <= 0:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        l2 = float(rng.uniform(0.5, 2.0))
        l1 = float(rng.uniform(1.0, 4.0)) * l2
        twist = float(rng.uniform(0.0, 2.0 * l2 * SIN60))
        out.append(ParallelogramParams(l1, l2, twist))
    return out

