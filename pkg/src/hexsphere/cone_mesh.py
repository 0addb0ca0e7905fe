"""Closed triangulated singular Euclidean surfaces.

A :class:`ConeSurface` is a list of Euclidean triangles, each stored in its own
planar chart, together with a pairing of triangle sides. Side ``i`` of a face
runs from corner ``i`` to corner ``i + 1``; every chart has corner 0 at the
origin and side 0 on the positive x-axis. Glued sides are always identified
with opposite orientations, so the quotient is oriented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .planar import TWO_PI, PlanarIsometry, Point, angle_between, dist
from .tolerances import EPS_ANG, EPS_LEN

__all__ = [
    "ConeSurface",
    "ConeSector",
    "VertexAngleReport",
    "Violation",
    "cone_angle",
    "singular_locus",
    "gauss_bonnet_check",
    "validate",
    "total_curvature_residual",
    "split_face",
]

HalfEdge = tuple[int, int]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def _kahan_area(a: float, b: float, c: float) -> float:
    """Triangle area from side lengths, stable for needle-shaped triangles."""
    a, b, c = sorted((a, b, c), reverse=True)
    prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * math.sqrt(max(prod, 0.0))


def chart_from_lengths(l01: float, l12: float, l20: float) -> tuple[Point, Point, Point]:
    if not l01 > 0:
        return ((0.0, 0.0), (l01, 0.0), (0.0, 0.0))
    x = (l20 * l20 + (l01 - l12) * (l01 + l12)) / (2.0 * l01)
    y = 2.0 * _kahan_area(l01, l12, l20) / l01
    return ((0.0, 0.0), (l01, 0.0), (x, y))


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "detail": self.detail}


@dataclass(frozen=True)
class VertexAngleReport:
    vertex: int
    cone_angle: float
    curvature: float
    is_singular: bool


@dataclass(frozen=True)
class ConeSector:
    """Tangent cone cut open along one ray: ``{(r, phi): 0 <= phi <= apex_angle}``."""

    apex_angle: float

    def to_plane(self, r: float, phi: float) -> Point:
        return (r * math.cos(phi), r * math.sin(phi))


class ConeSurface:
    """Immutable triangulated cone surface.

    Parameters
    ----------
    lengths : sequence of (l01, l12, l20)
        Side lengths of every face.
    gluing : sequence of (face_a, side_a, face_b, side_b)
        Side pairings; each side should appear at most once.
    marks : mapping str -> vertex id, optional
    """

    def __init__(self, lengths: Sequence[Sequence[float]], gluing: Iterable[Sequence[int]],
                 marks: Mapping[str, int] | None = None):
        self.lengths: tuple[tuple[float, float, float], ...] = tuple(
            (float(a), float(b), float(c)) for a, b, c in lengths
        )
        self.n_faces = len(self.lengths)
        self.charts: tuple[tuple[Point, Point, Point], ...] = tuple(
            chart_from_lengths(*ls) for ls in self.lengths
        )
        twin: dict[HalfEdge, HalfEdge] = {}
        problems: list[Violation] = []
        pairs = []
        for fa, sa, fb, sb in gluing:
            ha, hb = (int(fa), int(sa)), (int(fb), int(sb))
            bad = [h for h in (ha, hb) if not (0 <= h[0] < self.n_faces and 0 <= h[1] < 3)]
            if bad:
                problems.append(Violation("bad-side", f"side {bad[0]} does not exist"))
                continue
            if ha == hb:
                problems.append(Violation("self-glued", f"side {ha} glued to itself"))
                continue
            dup = [h for h in (ha, hb) if h in twin]
            if dup:
                problems.append(Violation("non-manifold", f"side {dup[0]} paired more than once"))
                continue
            twin[ha], twin[hb] = hb, ha
            pairs.append((ha, hb) if ha < hb else (hb, ha))
        self.twin = twin
        self.gluing: tuple[tuple[int, int, int, int], ...] = tuple(
            (a[0], a[1], b[0], b[1]) for a, b in sorted(pairs)
        )
        self._problems = tuple(problems)

        uf = _UnionFind(3 * self.n_faces)
        for (fa, sa), (fb, sb) in pairs:
            uf.union(3 * fa + sa, 3 * fb + (sb + 1) % 3)
            uf.union(3 * fa + (sa + 1) % 3, 3 * fb + sb)
        ids: dict[int, int] = {}
        vertex_of = []
        for f in range(self.n_faces):
            row = []
            for i in range(3):
                root = uf.find(3 * f + i)
                row.append(ids.setdefault(root, len(ids)))
            vertex_of.append(tuple(row))
        self.vertex_of: tuple[tuple[int, int, int], ...] = tuple(vertex_of)
        self.n_vertices = len(ids)
        corners: list[list[HalfEdge]] = [[] for _ in range(self.n_vertices)]
        for f in range(self.n_faces):
            for i in range(3):
                corners[self.vertex_of[f][i]].append((f, i))
        self._corners = tuple(tuple(c) for c in corners)
        self.marks: dict[str, int] = dict(marks or {})
        self._angle_cache: dict[int, float] = {}

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_charts(cls, charts: Sequence[Sequence[Point]], gluing: Iterable[Sequence[int]],
                    marks: Mapping[str, int] | None = None) -> "ConeSurface":
        lengths = [(dist(c[0], c[1]), dist(c[1], c[2]), dist(c[2], c[0])) for c in charts]
        return cls(lengths, gluing, marks)

    def with_marks(self, marks: Mapping[str, int]) -> "ConeSurface":
        return ConeSurface(self.lengths, self.gluing, marks)

    def scaled(self, factor: float) -> "ConeSurface":
        return ConeSurface([[factor * x for x in ls] for ls in self.lengths], self.gluing, self.marks)

    # -- combinatorics ------------------------------------------------------

    def corners_of(self, vertex: int) -> tuple[HalfEdge, ...]:
        if not 0 <= vertex < self.n_vertices:
            raise KeyError(f"unknown vertex id {vertex}")
        return self._corners[vertex]

    def star(self, face: int, corner: int) -> list[HalfEdge]:
        """Corners around the vertex at ``(face, corner)`` in counterclockwise order."""
        out = [(face, corner)]
        f, i = face, corner
        while True:
            nxt = self.twin.get((f, (i + 2) % 3))
            if nxt is None:
                raise ValueError(f"vertex at corner {(face, corner)} touches an open side")
            f, i = nxt
            if (f, i) == (face, corner):
                return out
            out.append((f, i))
            if len(out) > 3 * self.n_faces:
                raise ValueError("star walk did not close")

    def vertex_star(self, vertex: int) -> list[HalfEdge]:
        return self.star(*min(self.corners_of(vertex)))

    def edges(self) -> list[HalfEdge]:
        """One representative half-edge per glued edge (the smaller one)."""
        return [(fa, sa) for fa, sa, _, _ in self.gluing]

    def euler_characteristic(self) -> int:
        open_sides = 3 * self.n_faces - 2 * len(self.gluing)
        return self.n_vertices - (len(self.gluing) + open_sides) + self.n_faces

    def is_closed(self) -> bool:
        return len(self.twin) == 3 * self.n_faces

    # -- geometry -----------------------------------------------------------

    def corner_angle(self, face: int, corner: int) -> float:
        c = self.charts[face]
        p = c[corner]
        return abs(angle_between(
            (c[(corner + 1) % 3][0] - p[0], c[(corner + 1) % 3][1] - p[1]),
            (c[(corner + 2) % 3][0] - p[0], c[(corner + 2) % 3][1] - p[1]),
        ))

    def cone_angle(self, vertex: int) -> float:
        if vertex not in self._angle_cache:
            self._angle_cache[vertex] = math.fsum(self.corner_angle(f, i) for f, i in self.corners_of(vertex))
        return self._angle_cache[vertex]

    def side_length(self, face: int, side: int) -> float:
        return self.lengths[face][side]

    def side_points(self, face: int, side: int) -> tuple[Point, Point]:
        c = self.charts[face]
        return c[side], c[(side + 1) % 3]

    def transition(self, face: int, side: int) -> PlanarIsometry:
        """Isometry from the chart of ``face`` to the chart of the face across ``side``."""
        g, k = self.twin[(face, side)]
        a0, b0 = self.side_points(face, side)
        b1, a1 = self.side_points(g, k)
        return PlanarIsometry.from_segments(a0, b0, a1, b1)

    def face_area(self, face: int) -> float:
        (x0, y0), (x1, y1), (x2, y2) = self.charts[face]
        return 0.5 * abs((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))

    def area(self) -> float:
        return math.fsum(self.face_area(f) for f in range(self.n_faces))

    def max_edge_length(self) -> float:
        return max(max(ls) for ls in self.lengths)

    def vertex_position(self, vertex: int) -> tuple[int, Point]:
        f, i = min(self.corners_of(vertex))
        return f, self.charts[f][i]

    def barycentric(self, face: int, p: Point) -> tuple[float, float, float]:
        (x0, y0), (x1, y1), (x2, y2) = self.charts[face]
        det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        l1 = ((p[0] - x0) * (y2 - y0) - (x2 - x0) * (p[1] - y0)) / det
        l2 = ((x1 - x0) * (p[1] - y0) - (p[0] - x0) * (y1 - y0)) / det
        return (1.0 - l1 - l2, l1, l2)

    def point_from_barycentric(self, face: int, bary: Sequence[float]) -> Point:
        c = self.charts[face]
        return (
            bary[0] * c[0][0] + bary[1] * c[1][0] + bary[2] * c[2][0],
            bary[0] * c[0][1] + bary[1] * c[1][1] + bary[2] * c[2][1],
        )

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "faces": [list(ls) for ls in self.lengths],
            "gluing": [list(g) for g in self.gluing],
            "marks": {k: self.marks[k] for k in sorted(self.marks)},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ConeSurface":
        faces = data["faces"]
        gluing = data.get("gluing", [])
        marks = data.get("marks", {})
        if faces and isinstance(faces[0][0], (list, tuple)):
            return cls.from_charts([[tuple(map(float, p)) for p in face] for face in faces], gluing, marks)
        return cls(faces, gluing, marks)

    def __repr__(self) -> str:
        return f"ConeSurface(faces={self.n_faces}, vertices={self.n_vertices}, marks={self.marks})"


# --- module-level operations ------------------------------------------------

def cone_angle(surface: ConeSurface, vertex: int) -> float:
    return surface.cone_angle(vertex)


def split_face(surface: ConeSurface, face: int, bary: Sequence[float] = (1 / 3, 1 / 3, 1 / 3)) -> ConeSurface:
    """Split ``face`` into three triangles around an interior point (a new flat vertex).

    Sub-face ``i`` keeps side ``i`` of the old face as its side 0; it reuses
    index ``face`` for ``i = 0`` and is appended otherwise. Marks follow their
    vertices.
    """
    if not 0 <= face < surface.n_faces:
        raise KeyError(f"unknown face {face}")
    if min(bary) <= 0:
        raise ValueError("split point must be strictly inside the face")
    total = sum(bary)
    p = surface.point_from_barycentric(face, [b / total for b in bary])
    c = surface.charts[face]
    n = surface.n_faces
    sub = [face, n, n + 1]
    charts = list(surface.charts) + [None, None]
    for i in range(3):
        charts[sub[i]] = (c[i], c[(i + 1) % 3], p)
    gluing = []
    for fa, sa, fb, sb in surface.gluing:
        ha = (sub[sa], 0) if fa == face else (fa, sa)
        hb = (sub[sb], 0) if fb == face else (fb, sb)
        gluing.append((*ha, *hb))
    for i in range(3):
        gluing.append((sub[i], 1, sub[(i + 1) % 3], 2))
    out = ConeSurface.from_charts(charts, gluing)
    marks = {}
    for name, v in surface.marks.items():
        f, i = surface.corners_of(v)[0]
        nf, ni = (sub[i], 0) if f == face else (f, i)
        marks[name] = out.vertex_of[nf][ni]
    return out.with_marks(marks)


def singular_locus(surface: ConeSurface) -> list[VertexAngleReport]:
    """Reports for every vertex whose cone angle differs from 2*pi."""
    out = []
    for v in range(surface.n_vertices):
        theta = surface.cone_angle(v)
        if abs(theta - TWO_PI) > EPS_ANG:
            out.append(VertexAngleReport(v, theta, TWO_PI - theta, True))
    return out


def total_curvature_residual(surface: ConeSurface) -> float:
    total = math.fsum(TWO_PI - surface.cone_angle(v) for v in range(surface.n_vertices))
    return abs(total - TWO_PI * surface.euler_characteristic())


def gauss_bonnet_check(surface: ConeSurface, region: Iterable[int] | None = None,
                       corner_angles: Sequence[float] | None = None) -> float:
    """Gauss-Bonnet residual of a union of faces.

    The region is treated as the abstract complex obtained by gluing its faces
    along the sides paired inside the region. Boundary corner angles are read
    off the triangulation unless ``corner_angles`` is given.
    """
    if region is None:
        faces = list(range(surface.n_faces))
    else:
        faces = sorted(set(int(f) for f in region))
    if not faces or faces[0] < 0 or faces[-1] >= surface.n_faces:
        raise ValueError("region must be a non-empty set of existing faces")
    inside = set(faces)
    index = {f: n for n, f in enumerate(faces)}
    uf = _UnionFind(3 * len(faces))
    internal = 0
    boundary_sides = []
    for f in faces:
        for s in range(3):
            other = surface.twin.get((f, s))
            if other is None or other[0] not in inside:
                boundary_sides.append((f, s))
                continue
            if (f, s) < other:
                internal += 1
                g, t = other
                uf.union(3 * index[f] + s, 3 * index[g] + (t + 1) % 3)
                uf.union(3 * index[f] + (s + 1) % 3, 3 * index[g] + t)
    angle_sum: dict[int, float] = {}
    for f in faces:
        for i in range(3):
            root = uf.find(3 * index[f] + i)
            angle_sum[root] = angle_sum.get(root, 0.0) + surface.corner_angle(f, i)
    on_boundary = set()
    for f, s in boundary_sides:
        on_boundary.add(uf.find(3 * index[f] + s))
        on_boundary.add(uf.find(3 * index[f] + (s + 1) % 3))
    chi = len(angle_sum) - (internal + len(boundary_sides)) + len(faces)
    interior = math.fsum(TWO_PI - a for r, a in angle_sum.items() if r not in on_boundary)
    if corner_angles is None:
        corner_angles = [angle_sum[r] for r in sorted(on_boundary)]
    turning = math.fsum(math.pi - a for a in corner_angles)
    return abs(interior + turning - TWO_PI * chi)


def validate(surface: ConeSurface) -> list[Violation]:
    """Every broken invariant of ``surface``; an empty list means valid."""
    out = list(surface._problems)
    for f, (l0, l1, l2) in enumerate(surface.lengths):
        top = max(l0, l1, l2)
        if min(l0, l1, l2) <= 0 or not all(map(math.isfinite, (l0, l1, l2))):
            out.append(Violation("degenerate-face", f"face {f} has a non-positive side"))
        elif l0 + l1 + l2 - 2 * top <= EPS_LEN * top:
            out.append(Violation("degenerate-face", f"face {f} violates the strict triangle inequality"))
    for fa, sa, fb, sb in surface.gluing:
        la, lb = surface.lengths[fa][sa], surface.lengths[fb][sb]
        if abs(la - lb) > EPS_LEN * max(la, lb):
            out.append(Violation("length-mismatch", f"sides {(fa, sa)} and {(fb, sb)}: {la!r} vs {lb!r}"))
    for f in range(surface.n_faces):
        for s in range(3):
            if (f, s) not in surface.twin:
                out.append(Violation("open-boundary", f"side {(f, s)} has no partner"))
    if surface.is_closed():
        for v in range(surface.n_vertices):
            corners = surface.corners_of(v)
            try:
                star = surface.star(*corners[0])
            except ValueError as exc:
                out.append(Violation("non-manifold", f"vertex {v}: {exc}"))
                continue
            if len(star) != len(corners):
                out.append(Violation("non-manifold", f"vertex {v} has a disconnected link"))
    for v in range(surface.n_vertices):
        theta = surface.cone_angle(v)
        if not (theta > 0 and math.isfinite(theta)):
            out.append(Violation("bad-angle", f"vertex {v} has cone angle {theta!r}"))
    for name, v in sorted(surface.marks.items()):
        if not (isinstance(v, int) and 0 <= v < surface.n_vertices):
            out.append(Violation("bad-mark", f"mark {name!r} points to missing vertex {v!r}"))
    return out
