"""Voronoi decomposition of a hex sphere about its two 4pi/3 cone points.

The cut locus is the set of points reached by at least two shortest
geodesics from {a, b}. Inside a face every candidate geodesic is a straight
segment from a developed source image, so the cut locus there is a union of
pieces of bisector lines between pairs of images. Each bisector (and each face
side) is split at every place where the set of winning images can change; the
midpoint of each piece decides whether it belongs to the cut locus. Pieces are
then stitched across faces by snapping endpoints, and chains of degree-2
points become the edges of the graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .builders import GluingPattern
from .cone_mesh import ConeSector, ConeSurface
from .geodesics import GeodesicField, SourceImage, propagate
from .planar import PlanarIsometry, Point, TWO_PI, angle_between, line_interval
from .tolerances import EPS_LEN, POS_REL, TIE_REL

__all__ = [
    "CutLocusError",
    "GammaVertex",
    "GammaEdge",
    "CutLocusGraph",
    "VoronoiPolygon",
    "compute_fields",
    "compute_cut_locus",
    "unfold_cell",
    "unfold_cells",
    "equidistant_residual",
    "export_reconstruction",
    "diameter_estimate",
]


class CutLocusError(RuntimeError):
    """The cut-locus pieces could not be stitched consistently."""


@dataclass(frozen=True)
class _Side:
    """One sheet of geodesics next to a cut segment: label, image, chart map."""

    label: str
    image: SourceImage
    to_image: PlanarIsometry  # segment chart -> image chart


@dataclass
class _Segment:
    face: int
    p0: Point
    p1: Point
    left: _Side
    right: _Side
    nodes: tuple[int, int] = (-1, -1)


@dataclass(frozen=True)
class GammaVertex:
    face: int
    point: Point
    degree: int
    cone_angle: float
    mark: str | None
    on_equidistant: bool
    dist_a: float
    dist_b: float

    @property
    def is_singular_c_or_d(self) -> bool:
        return self.mark in ("c", "d")


@dataclass(frozen=True)
class GammaEdge:
    u: int
    v: int
    length: float
    polyline: tuple[tuple[int, Point, Point], ...]
    left: _Side
    right: _Side
    left_end: _Side
    right_end: _Side

    @property
    def labels(self) -> tuple[str, str]:
        return (self.left.label, self.right.label)


@dataclass
class CutLocusGraph:
    vertices: list[GammaVertex]
    edges: list[GammaEdge]
    p: int
    q: int
    diameter: float
    fields: dict[str, GeodesicField] = field(repr=False, default_factory=dict)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * len(self.vertices)
        for e in self.edges:
            deg[e.u] += 1
            deg[e.v] += 1
        return deg

    def betti_1(self) -> int:
        return self.n_edges - self.n_vertices + self.n_components()

    def n_components(self) -> int:
        parent = list(range(self.n_vertices))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for e in self.edges:
            parent[find(e.u)] = find(e.v)
        return len({find(i) for i in range(self.n_vertices)})

    def total_length(self) -> float:
        return math.fsum(e.length for e in self.edges)

    def edge_pairs(self) -> list[tuple[int, int]]:
        return [(e.u, e.v) for e in self.edges]

    def vertex_of_mark(self, mark: str) -> int | None:
        return next((i for i, v in enumerate(self.vertices) if v.mark == mark), None)


@dataclass(frozen=True)
class VoronoiPolygon:
    """A cell developed into the sector of its center's tangent cone.

    Corners are polar ``(r, phi)`` with corner 0 on the ray ``phi = 0``;
    ``phi`` increases counterclockwise and the boundary closes up after one
    turn of ``sector.apex_angle``. Edge ``k`` runs from corner ``k`` to
    corner ``k + 1``.
    """

    center: str
    sector: ConeSector
    corners: tuple[tuple[float, float], ...]
    edge_lengths: tuple[float, ...]
    corner_angles: tuple[float, ...]
    gamma_vertices: tuple[int, ...]
    gamma_edges: tuple[tuple[int, int], ...]  # (edge id, 0 = left side / 1 = right side)
    cut_angle: float = 0.0

    @property
    def n_edges(self) -> int:
        return len(self.edge_lengths)

    def spans(self) -> list[float]:
        theta = self.sector.apex_angle
        phis = [phi for _, phi in self.corners] + [theta]
        return [phis[k + 1] - phis[k] for k in range(self.n_edges)]

    def planar_corners(self) -> list[Point]:
        """Corner positions in the plane, plus the closing copy of corner 0."""
        pts = [self.sector.to_plane(r, phi) for r, phi in self.corners]
        pts.append(self.sector.to_plane(self.corners[0][0], self.sector.apex_angle))
        return pts

    def area(self) -> float:
        pts = self.planar_corners()
        return math.fsum(0.5 * (pts[k][0] * pts[k + 1][1] - pts[k][1] * pts[k + 1][0])
                         for k in range(self.n_edges))

    def perimeter(self) -> float:
        return math.fsum(self.edge_lengths)


# --- helpers -------------------------------------------------------------------

def compute_fields(surface: ConeSurface) -> dict[str, GeodesicField]:
    marks = surface.marks
    missing = [m for m in "abcd" if m not in marks]
    if missing:
        raise ValueError(f"marks missing: {missing}")
    return {m: propagate(surface, marks[m]) for m in "ab"}


def diameter_estimate(fields: dict[str, GeodesicField]) -> float:
    """Largest distance from a or b to a mesh vertex; within a factor 2 of the diameter."""
    return max(f.radius() for f in fields.values())


def _face_polygon(surface: ConeSurface, face: int) -> list[Point]:
    return list(surface.charts[face])


class _Builder:
    def __init__(self, surface: ConeSurface, fields: dict[str, GeodesicField]):
        self.S = surface
        self.fields = fields
        self.diam = diameter_estimate(fields)
        self.eps_pos = POS_REL * self.diam
        self.eps_eval = EPS_LEN * self.diam
        self.eps_tie = TIE_REL * self.diam
        self.eps_side = 1e-3 * EPS_LEN * self.diam
        self.segments: list[_Segment] = []

    # per-face candidate identities -------------------------------------------

    def identities(self, face: int, extra: Sequence[tuple[int, PlanarIsometry]] = ()) -> list[list[tuple[_Side, SourceImage]]]:
        """Images visible in ``face`` (and in ``extra`` faces mapped into it), grouped by geodesic sheet.

        Each group is a list of (side, image-in-this-chart) where the image
        copy has its position and window expressed in the chart of ``face``.
        """
        groups: list[list[tuple[_Side, SourceImage]]] = []
        keys: list[tuple[str, Point]] = []
        tol = 1e-9 * self.diam
        sources = [(face, PlanarIsometry.identity())] + list(extra)
        for f, iso in sources:
            back = iso.inverse()
            for label in "ab":
                for img in self.fields[label].images[f]:
                    pos = iso(img.position)
                    side = _Side(label, img, back)
                    for k, (lab, p) in enumerate(keys):
                        if lab == label and abs(p[0] - pos[0]) <= tol and abs(p[1] - pos[1]) <= tol:
                            groups[k].append((side, img))
                            break
                    else:
                        keys.append((label, pos))
                        groups.append([(side, img)])
        return groups

    def visible(self, side: _Side, x: Point) -> bool:
        field = self.fields[side.label]
        return field.visible(side.image, side.to_image(x))

    def group_distance(self, group, x: Point) -> float | None:
        best = None
        for side, _ in group:
            if self.visible(side, x):
                y = side.to_image(x)
                d = math.hypot(y[0] - side.image.position[0], y[1] - side.image.position[1])
                if best is None or d < best:
                    best = d
        return best

    def winners(self, groups, x: Point, tol: float | None = None) -> list[tuple[int, float, _Side]]:
        vals = []
        for k, g in enumerate(groups):
            for side, _ in g:
                if self.visible(side, x):
                    y = side.to_image(x)
                    d = math.hypot(y[0] - side.image.position[0], y[1] - side.image.position[1])
                    vals.append((k, d, side))
                    break
        if not vals:
            raise CutLocusError(f"no geodesic reaches point {x}")
        dmin = min(v[1] for v in vals)
        tol = self.eps_eval if tol is None else tol
        return [v for v in vals if v[1] <= dmin + tol]

    def group_position(self, group) -> Point:
        side, img = group[0]
        return side.to_image.inverse()(img.position)

    # breakpoints along a line -------------------------------------------------

    def wedge_rays(self, groups) -> list[tuple[Point, Point]]:
        """Boundary rays (origin, direction) of every windowed image, in the face chart."""
        rays = []
        for g in groups:
            for side, img in g:
                if img.entry_side is None:
                    continue
                a, b = self.S.side_points(img.face, img.entry_side)
                length = self.S.lengths[img.face][img.entry_side]
                back = side.to_image.inverse()
                s = back(img.position)
                for t in img.interval:
                    w = back((a[0] + (b[0] - a[0]) * t / length, a[1] + (b[1] - a[1]) * t / length))
                    rays.append((s, (w[0] - s[0], w[1] - s[1])))
        return rays

    def breakpoints(self, groups, origin: Point, direction: Point, t0: float, t1: float,
                    rays) -> list[float]:
        ts = {t0, t1}
        ox, oy = origin
        dx, dy = direction
        for s, r in rays:
            den = dx * r[1] - dy * r[0]
            if abs(den) < 1e-300:
                continue
            t = ((s[0] - ox) * r[1] - (s[1] - oy) * r[0]) / den
            if t0 < t < t1:
                ts.add(t)
        pos = [self.group_position(g) for g in groups]
        for i in range(len(pos)):
            for j in range(i + 1, len(pos)):
                # |x - si|^2 - |x - sj|^2 is affine along the line
                si, sj = pos[i], pos[j]
                slope = 2.0 * (dx * (sj[0] - si[0]) + dy * (sj[1] - si[1]))
                c0 = ((ox - si[0]) ** 2 + (oy - si[1]) ** 2) - ((ox - sj[0]) ** 2 + (oy - sj[1]) ** 2)
                if abs(slope) < 1e-300:
                    continue
                t = -c0 / slope
                if t0 < t < t1:
                    ts.add(t)
        return sorted(ts)

    # passes -----------------------------------------------------------------------

    def face_pass(self, face: int) -> None:
        groups = self.identities(face)
        poly = _face_polygon(self.S, face)
        rays = self.wedge_rays(groups)
        pos = [self.group_position(g) for g in groups]
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                si, sj = pos[i], pos[j]
                mid = (0.5 * (si[0] + sj[0]), 0.5 * (si[1] + sj[1]))
                n = (sj[0] - si[0], sj[1] - si[1])
                ln = math.hypot(*n)
                if ln < 1e-12 * self.diam:
                    continue
                direction = (-n[1] / ln, n[0] / ln)
                span = line_interval(poly, mid, direction, 0.0)
                if span is None or span[1] - span[0] <= self.eps_pos:
                    continue
                ts = self.breakpoints(groups, mid, direction, span[0], span[1], rays)
                run = None
                for t_lo, t_hi in zip(ts, ts[1:]):
                    ok = False
                    if t_hi - t_lo > self.eps_pos:
                        tm = 0.5 * (t_lo + t_hi)
                        x = (mid[0] + tm * direction[0], mid[1] + tm * direction[1])
                        won = {k for k, _, _ in self.winners(groups, x)}
                        ok = i in won and j in won
                    if ok:
                        run = (run[0] if run else t_lo, t_hi)
                    elif t_hi - t_lo > self.eps_pos or not run:
                        if run:
                            self.add_face_segment(face, groups, i, j, mid, direction, run)
                        run = None
                if run:
                    self.add_face_segment(face, groups, i, j, mid, direction, run)

    def add_face_segment(self, face, groups, i, j, mid, direction, run) -> None:
        p0 = (mid[0] + run[0] * direction[0], mid[1] + run[0] * direction[1])
        p1 = (mid[0] + run[1] * direction[0], mid[1] + run[1] * direction[1])
        if self.on_one_side(face, p0, p1):
            return
        self.segments.append(self.oriented_segment(face, p0, p1, groups[i], groups[j]))

    def on_one_side(self, face: int, p0: Point, p1: Point) -> bool:
        """Whether the piece runs along a side; the side pass reports those.

        The threshold must stay below what the side pass resolves as a tie,
        otherwise a piece running just off a side is lost by both passes.
        """
        c = self.S.charts[face]
        for s in range(3):
            a, b = c[s], c[(s + 1) % 3]
            length = self.S.lengths[face][s]
            h0 = ((b[0] - a[0]) * (p0[1] - a[1]) - (b[1] - a[1]) * (p0[0] - a[0])) / length
            h1 = ((b[0] - a[0]) * (p1[1] - a[1]) - (b[1] - a[1]) * (p1[0] - a[0])) / length
            if abs(h0) <= self.eps_side and abs(h1) <= self.eps_side:
                return True
        return False

    def oriented_segment(self, face, p0, p1, gi, gj) -> _Segment:
        mid = (0.5 * (p0[0] + p1[0]), 0.5 * (p0[1] + p1[1]))
        si = self.pick_visible(gi, mid)
        sj = self.pick_visible(gj, mid)
        pi = si.to_image.inverse()(si.image.position)
        cr = (p1[0] - p0[0]) * (pi[1] - p0[1]) - (p1[1] - p0[1]) * (pi[0] - p0[0])
        left, right = (si, sj) if cr > 0 else (sj, si)
        return _Segment(face, p0, p1, left, right)

    def pick_visible(self, group, x: Point) -> _Side:
        for side, _ in group:
            if self.visible(side, x):
                return side
        return group[0][0]

    def side_pass(self, face: int, s: int) -> None:
        g, t = self.S.twin[(face, s)]
        if (g, t) < (face, s):
            return
        to_face = self.S.transition(face, s).inverse()  # chart g -> chart face
        groups = self.identities(face, [(g, to_face)])
        a, b = self.S.side_points(face, s)
        length = self.S.lengths[face][s]
        direction = ((b[0] - a[0]) / length, (b[1] - a[1]) / length)
        ts = self.breakpoints(groups, a, direction, 0.0, length, self.wedge_rays(groups))
        run = None
        for t_lo, t_hi in zip(ts, ts[1:]):
            pair = None
            if t_hi - t_lo > self.eps_pos:
                tm = 0.5 * (t_lo + t_hi)
                x = (a[0] + tm * direction[0], a[1] + tm * direction[1])
                won = self.winners(groups, x, 10.0 * self.eps_side)
                if len(won) > 2:
                    raise CutLocusError(f"{len(won)} tied geodesics along side {s} of face {face}")
                if len(won) == 2:
                    pair = (won[0][0], won[1][0])
            if pair is not None and run is not None and run[2] == pair:
                run = (run[0], t_hi, pair)
                continue
            if pair is None and t_hi - t_lo <= self.eps_pos and run is not None:
                run = (run[0], t_hi, run[2])
                continue
            if run is not None:
                self.add_side_segment(face, groups, a, direction, run)
            run = (t_lo, t_hi, pair) if pair is not None else None
        if run is not None:
            self.add_side_segment(face, groups, a, direction, run)

    def add_side_segment(self, face, groups, a, direction, run) -> None:
        t0, t1, (i, j) = run
        p0 = (a[0] + t0 * direction[0], a[1] + t0 * direction[1])
        p1 = (a[0] + t1 * direction[0], a[1] + t1 * direction[1])
        self.segments.append(self.oriented_segment(face, p0, p1, groups[i], groups[j]))

    # stitching ---------------------------------------------------------------------

    def representations(self, face: int, p: Point) -> list[tuple[int, Point]]:
        c = self.S.charts[face]
        for i in range(3):
            if math.hypot(p[0] - c[i][0], p[1] - c[i][1]) <= self.eps_pos:
                return [(f, self.S.charts[f][j]) for f, j in self.S.star(face, i)]
        for s in range(3):
            a, b = c[s], c[(s + 1) % 3]
            length = self.S.lengths[face][s]
            h = ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])) / length
            if abs(h) <= self.eps_pos:
                g, _ = self.S.twin[(face, s)]
                return [(face, p), (g, self.S.transition(face, s)(p))]
        return [(face, p)]

    def stitch(self):
        reps: list[list[tuple[int, Point]]] = []
        ends = []
        for k, seg in enumerate(self.segments):
            for e, p in enumerate((seg.p0, seg.p1)):
                reps.append(self.representations(seg.face, p))
                ends.append((k, e))
        n = len(reps)
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        by_face: dict[int, list[tuple[int, Point]]] = {}
        for idx, rr in enumerate(reps):
            for f, p in rr:
                by_face.setdefault(f, []).append((idx, p))
        tol = 2.0 * self.eps_pos
        for items in by_face.values():
            for x in range(len(items)):
                for y in range(x + 1, len(items)):
                    (i, p), (j, q) = items[x], items[y]
                    if abs(p[0] - q[0]) <= tol and abs(p[1] - q[1]) <= tol and math.hypot(p[0] - q[0], p[1] - q[1]) <= tol:
                        parent[find(i)] = find(j)
        roots = sorted({find(i) for i in range(n)})
        node_of_root = {r: k for k, r in enumerate(roots)}
        node_rep: list[tuple[int, Point]] = [None] * len(roots)  # type: ignore[list-item]
        for idx in range(n):
            k = node_of_root[find(idx)]
            if node_rep[k] is None:
                f, p = reps[idx][0]
                node_rep[k] = (f, self.clamp(f, p))
        for (k, e), idx in zip(ends, range(n)):
            seg = self.segments[k]
            nodes = list(seg.nodes)
            nodes[e] = node_of_root[find(idx)]
            seg.nodes = (nodes[0], nodes[1])
        return node_rep

    def clamp(self, face: int, p: Point) -> Point:
        bary = [max(0.0, v) for v in self.S.barycentric(face, p)]
        total = sum(bary)
        return self.S.point_from_barycentric(face, [v / total for v in bary])

    def vertex_at(self, face: int, p: Point) -> int | None:
        c = self.S.charts[face]
        for i in range(3):
            if math.hypot(p[0] - c[i][0], p[1] - c[i][1]) <= 2.0 * self.eps_pos:
                return self.S.vertex_of[face][i]
        return None

    def build(self) -> CutLocusGraph:
        for f in range(self.S.n_faces):
            self.face_pass(f)
            for s in range(3):
                self.side_pass(f, s)
        self.segments = [sg for sg in self.segments
                         if math.hypot(sg.p1[0] - sg.p0[0], sg.p1[1] - sg.p0[1]) > self.eps_pos]
        if not self.segments:
            raise CutLocusError("empty cut locus")
        node_rep = self.stitch()
        n_nodes = len(node_rep)
        incident: list[list[tuple[int, int]]] = [[] for _ in range(n_nodes)]
        for k, seg in enumerate(self.segments):
            if seg.nodes[0] == seg.nodes[1]:
                raise CutLocusError(f"segment {k} collapsed to a point after snapping")
            incident[seg.nodes[0]].append((k, 0))
            incident[seg.nodes[1]].append((k, 1))
        marks = self.S.marks
        mark_of_vertex = {v: m for m, v in marks.items()}
        node_mark: dict[int, str] = {}
        for k, (f, p) in enumerate(node_rep):
            v = self.vertex_at(f, p)
            if v is not None and v in mark_of_vertex:
                node_mark[k] = mark_of_vertex[v]
        for m in "cd":
            if m not in node_mark.values():
                raise CutLocusError(f"cone point {m} is not on the cut locus")
        for m in "ab":
            if m in node_mark.values():
                raise CutLocusError(f"center {m} lies on the cut locus")
        is_vertex = [len(incident[k]) != 2 or k in node_mark for k in range(n_nodes)]
        order = [k for k in range(n_nodes) if is_vertex[k]]
        order.sort(key=lambda k: (0, "cd".index(node_mark[k])) if k in node_mark else (1, k))
        vid = {k: i for i, k in enumerate(order)}
        used = [False] * len(self.segments)
        edges: list[GammaEdge] = []
        for start in order:
            for k0, e0 in incident[start]:
                if used[k0]:
                    continue
                edges.append(self.walk(start, k0, e0, incident, is_vertex, used, vid))
        if not all(used):
            raise CutLocusError("cut locus has a closed component without vertices")
        vertices = []
        fa, fb = self.fields["a"], self.fields["b"]
        deg = [0] * len(order)
        for e in edges:
            deg[e.u] += 1
            deg[e.v] += 1
        for i, k in enumerate(order):
            f, p = node_rep[k]
            v = self.vertex_at(f, p)
            cone = self.S.cone_angle(v) if v is not None else TWO_PI
            da, db = fa.distance(f, p), fb.distance(f, p)
            vertices.append(GammaVertex(f, p, deg[i], cone, node_mark.get(k), abs(da - db) <= self.eps_tie, da, db))
        p_count = sum((e.left.label == "a") + (e.right.label == "a") for e in edges)
        q_count = 2 * len(edges) - p_count
        return CutLocusGraph(vertices, edges, p_count, q_count, self.diam, dict(self.fields))

    def walk(self, start, k0, e0, incident, is_vertex, used, vid) -> GammaEdge:
        polyline = []
        length = 0.0
        first_left = first_right = None
        node, k, e = start, k0, e0
        while True:
            used[k] = True
            seg = self.segments[k]
            if e == 0:
                a, b, left, right = seg.p0, seg.p1, seg.left, seg.right
            else:
                a, b, left, right = seg.p1, seg.p0, seg.right, seg.left
            if first_left is None:
                first_left, first_right = left, right
            polyline.append((seg.face, a, b))
            length += math.hypot(b[0] - a[0], b[1] - a[1])
            node = seg.nodes[1 - e]
            if is_vertex[node]:
                break
            nxt = [(kk, ee) for kk, ee in incident[node] if kk != k]
            if len(nxt) != 1 or used[nxt[0][0]]:
                raise CutLocusError("inconsistent chain while assembling cut-locus edges")
            k, e = nxt[0]
        if left.label != first_left.label or right.label != first_right.label:
            raise CutLocusError("cell label changes along a cut-locus edge")
        return GammaEdge(vid[start], vid[node], length, tuple(polyline), first_left, first_right, left, right)


def compute_cut_locus(surface: ConeSurface, fields: dict[str, GeodesicField] | None = None) -> CutLocusGraph:
    """Voronoi graph of the cells about the marked points a and b."""
    if fields is None:
        fields = compute_fields(surface)
    missing = [m for m in "abcd" if m not in surface.marks]
    if missing:
        raise ValueError(f"marks missing: {missing}")
    return _Builder(surface, fields).build()


# --- cells -----------------------------------------------------------------------

def _star_offsets(surface: ConeSurface, vertex: int) -> dict[tuple[int, int], float]:
    f, i = surface.corners_of(vertex)[0]
    out = {}
    acc = 0.0
    for g, j in surface.star(f, i):
        out[(g, j)] = acc
        acc += surface.corner_angle(g, j)
    return out


def _polar(surface: ConeSurface, offsets, side: _Side, x: Point) -> tuple[float, float]:
    img = side.image
    y = side.to_image(x)
    r = math.hypot(y[0] - img.position[0], y[1] - img.position[1])
    f0, i0 = img.base
    z = img.transform.inverse()(y)
    c = surface.charts[f0]
    e = (c[(i0 + 1) % 3][0] - c[i0][0], c[(i0 + 1) % 3][1] - c[i0][1])
    v = (z[0] - c[i0][0], z[1] - c[i0][1])
    # the sheet is straight in the developed star, so angles past the
    # base corner's wedge still measure the direction at the apex
    return r, offsets[(f0, i0)] + angle_between(e, v)


def unfold_cell(surface: ConeSurface, field: GeodesicField, center: str, graph: CutLocusGraph) -> VoronoiPolygon:
    """Develop the cell of ``center`` into its tangent-cone sector."""
    if center not in ("a", "b"):
        raise ValueError(f"center must be 'a' or 'b', got {center!r}")
    vertex = surface.marks[center]
    if field.source != vertex:
        raise ValueError("field source does not match the cell center")
    theta = surface.cone_angle(vertex)
    offsets = _star_offsets(surface, vertex)
    sides = []  # (phi_start, r_start, phi_end, r_end, start vertex, edge id, side flag)
    for k, e in enumerate(graph.edges):
        first_face, first_a, _ = e.polyline[0]
        last_face, _, last_b = e.polyline[-1]
        if e.left.label == center:
            r0, f0 = _polar(surface, offsets, e.left, first_a)
            r1, f1 = _polar(surface, offsets, e.left_end, last_b)
            sides.append((f0, r0, f1, r1, e.u, e.v, k, 0))
        if e.right.label == center:
            r0, f0 = _polar(surface, offsets, e.right_end, last_b)
            r1, f1 = _polar(surface, offsets, e.right, first_a)
            sides.append((f0, r0, f1, r1, e.v, e.u, k, 1))
    if len(sides) < 1:
        raise CutLocusError(f"cell {center} has no boundary edges")
    tol_r = 1e3 * POS_REL * graph.diameter
    sides.sort(key=lambda s: (s[0] % theta))
    base = sides[0][0] % theta
    corners, lengths, vertices, gedges, spans = [], [], [], [], []
    for s in sides:
        phi0 = (s[0] - base) % theta
        if phi0 > theta - 1e-9:
            phi0 = 0.0
        span = (s[2] - s[0]) % theta
        if span > theta - 1e-6:
            span = 0.0
        corners.append((s[1], phi0))
        spans.append(span)
        vertices.append(s[4])
        gedges.append((s[6], s[7]))
        lengths.append(graph.edges[s[6]].length)
    n = len(sides)
    for k in range(n):
        nxt = sides[(k + 1) % n]
        end_phi = (corners[k][1] + spans[k]) if k < n - 1 else corners[k][1] + spans[k] - theta
        target = corners[(k + 1) % n][1]
        if sides[k][5] != nxt[4] or abs(end_phi - target) > 1e-6 or abs(sides[k][3] - nxt[1]) > tol_r:
            raise CutLocusError(f"cell {center}: boundary does not close up at corner {k + 1}")
    angles = []
    for k in range(n):
        prev_r = corners[k - 1][0]
        prev_phi = corners[k][1] - spans[k - 1]
        r, phi = corners[k]
        nxt_r = corners[(k + 1) % n][0]
        nxt_phi = phi + spans[k]
        x = (r * math.cos(phi), r * math.sin(phi))
        xp = (prev_r * math.cos(prev_phi), prev_r * math.sin(prev_phi))
        xn = (nxt_r * math.cos(nxt_phi), nxt_r * math.sin(nxt_phi))
        to_next = (xn[0] - x[0], xn[1] - x[1])
        to_prev = (xp[0] - x[0], xp[1] - x[1])
        angles.append(angle_between(to_next, to_prev) % TWO_PI)
    return VoronoiPolygon(center, ConeSector(theta), tuple(corners), tuple(lengths), tuple(angles),
                          tuple(vertices), tuple(gedges), base)


def unfold_cells(surface: ConeSurface, graph: CutLocusGraph) -> dict[str, VoronoiPolygon]:
    return {m: unfold_cell(surface, graph.fields[m], m, graph) for m in "ab"}


def equidistant_residual(surface: ConeSurface, graph: CutLocusGraph, samples: int = 8) -> float:
    """Max |d(a,x) - d(b,x)| over sample points of edges between the two cells."""
    fa, fb = graph.fields["a"], graph.fields["b"]
    worst = 0.0
    for e in graph.edges:
        if {e.left.label, e.right.label} != {"a", "b"}:
            continue
        for face, p0, p1 in e.polyline:
            for k in range(samples + 1):
                t = k / samples
                x = (p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1]))
                worst = max(worst, abs(fa.distance(face, x) - fb.distance(face, x)))
    return worst


def export_reconstruction(graph: CutLocusGraph, cell_a: VoronoiPolygon, cell_b: VoronoiPolygon) -> GluingPattern:
    """Cut both cells open along the ray to their corner 0 and pair the edges.

    Polygon ``k`` is ``[apex, corner 0, ..., corner p-1, corner 0 turned by
    the apex angle]``; edge 0 and the last edge are the two banks of the cut,
    edge ``j + 1`` is the cell edge ``j``.
    """
    polygons = []
    pairing = []
    where: dict[tuple[int, int], tuple[int, int]] = {}
    marks: dict[str, tuple[int, int]] = {}
    for idx, cell in enumerate((cell_a, cell_b)):
        pts = [(0.0, 0.0)] + cell.planar_corners()
        polygons.append(tuple(pts))
        n = len(pts)
        pairing.append((idx, 0, idx, n - 1, True))
        for j, key in enumerate(cell.gamma_edges):
            where[key] = (idx, j + 1)
        marks[cell.center] = (idx, 0)
        for j, v in enumerate(cell.gamma_vertices):
            m = graph.vertices[v].mark
            if m in ("c", "d") and m not in marks:
                marks[m] = (idx, j + 1)
    for k in range(len(graph.edges)):
        if (k, 0) not in where or (k, 1) not in where:
            raise CutLocusError(f"edge {k} is not on two cell boundaries")
        pa, ea = where[(k, 0)]
        pb, eb = where[(k, 1)]
        pairing.append((pa, ea, pb, eb, True))
    return GluingPattern(tuple(polygons), tuple(pairing), marks)
