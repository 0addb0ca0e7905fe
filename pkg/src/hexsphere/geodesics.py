"""Exact geodesic distance from a vertex by window propagation.

Every geodesic leaving the source develops to a straight segment. A window is
a sub-interval of a face side together with the developed position of the
source in the chart of the face it enters; windows are pushed across faces in
order of their minimum distance and trimmed against each other on every
edge, so the surviving images answer distance queries exactly.

Geodesics are never continued through a vertex: for cone angles below 2*pi no
shortest path passes through a cone point, and rays grazing a flat vertex are
recovered as limits of windows on both sides.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .cone_mesh import ConeSurface, validate
from .planar import TWO_PI, PlanarIsometry, Point, angle_between, subtract_interval
from .tolerances import EPS_PRUNE, TIE_REL

__all__ = [
    "SourceImage",
    "GeodesicField",
    "propagate",
    "distance",
    "count_shortest_geodesics",
    "mark_distance_matrix",
    "oracle_distance",
    "oracle_distances",
    "oracle_converged",
]

HalfEdge = tuple[int, int]
MAX_WINDOWS = 200_000


@dataclass(frozen=True)
class SourceImage:
    """A developed copy of the source in the chart of ``face``.

    ``entry_side`` is ``None`` for an image sitting at a corner of the face;
    otherwise the image is valid only on points reached through the
    ``interval`` (arc-length parameters from corner ``entry_side``) of that
    side. ``base`` is the source corner the geodesic leaves from and
    ``transform`` maps the chart of ``base[0]`` to the chart of ``face``.
    """

    face: int
    position: Point
    entry_side: int | None
    interval: tuple[float, float]
    witness: tuple[HalfEdge, ...]
    base: tuple[int, int]
    transform: PlanarIsometry


class _Window:
    __slots__ = ("face", "side", "s", "us", "h2", "edge", "canon", "length",
                 "intervals", "witness", "base", "T", "alive", "pseudo")

    def local_intervals(self) -> list[tuple[float, float]]:
        if self.canon:
            return list(self.intervals)
        return sorted((self.length - hi, self.length - lo) for lo, hi in self.intervals)

    def min_distance(self) -> float:
        best = math.inf
        for lo, hi in self.intervals:
            u = min(max(self.us, lo), hi)
            best = min(best, (u - self.us) ** 2 + self.h2)
        return math.sqrt(best)


class GeodesicField:
    """Distance function of one source vertex, stored as per-face source images."""

    def __init__(self, surface: ConeSurface, source: int, images: Sequence[Sequence[SourceImage]],
                 n_windows: int = 0):
        self.surface = surface
        self.source = source
        self.images: tuple[tuple[SourceImage, ...], ...] = tuple(tuple(i) for i in images)
        self.n_windows = n_windows
        self._scale = surface.max_edge_length()
        self._vtx: dict[int, float] = {}

    # -- queries ------------------------------------------------------------

    def visible(self, img: SourceImage, p: Point, tol: float | None = None) -> bool:
        if img.entry_side is None:
            return True
        if tol is None:
            tol = 1e-9 * self._scale
        a, b = self.surface.side_points(img.face, img.entry_side)
        length = self.surface.lengths[img.face][img.entry_side]
        dx, dy = (b[0] - a[0]) / length, (b[1] - a[1]) / length
        sx, sy = img.position
        lo, hi = img.interval
        w0 = (a[0] + lo * dx - sx, a[1] + lo * dy - sy)
        w1 = (a[0] + hi * dx - sx, a[1] + hi * dy - sy)
        v = (p[0] - sx, p[1] - sy)
        n0, n1 = math.hypot(*w0), math.hypot(*w1)
        return (w0[0] * v[1] - w0[1] * v[0]) <= tol * n0 and (w1[0] * v[1] - w1[1] * v[0]) >= -tol * n1

    def candidates(self, face: int, point: Point) -> list[tuple[float, SourceImage]]:
        """(distance, image) for every image of ``face`` that sees ``point``."""
        out = []
        for img in self.images[face]:
            if self.visible(img, point):
                out.append((math.hypot(point[0] - img.position[0], point[1] - img.position[1]), img))
        return out

    def distance(self, face: int, point: Point) -> float:
        _check_inside(self.surface, face, point)
        cands = self.candidates(face, point)
        if not cands:
            raise RuntimeError(f"no source image sees point {point} of face {face}")
        return min(d for d, _ in cands)

    def vertex_distance(self, vertex: int) -> float:
        if vertex not in self._vtx:
            best = math.inf
            for f, i in self.surface.corners_of(vertex):
                p = self.surface.charts[f][i]
                for d, _ in self.candidates(f, p):
                    best = min(best, d)
            self._vtx[vertex] = best
        return self._vtx[vertex]

    def radius(self) -> float:
        return max(self.vertex_distance(v) for v in range(self.surface.n_vertices))

    def arrival_angles(self, face: int, point: Point, eps: float) -> list[tuple[float, SourceImage, int, Point]]:
        """Shortest geodesics to ``point`` as (length, image, face, point-in-face-chart).

        Images from every face containing ``point`` are gathered and
        duplicates (same geodesic seen from two charts) removed by their
        arrival direction.
        """
        _check_inside(self.surface, face, point)
        reps = point_representations(self.surface, face, point)
        found = []
        for f, p, offset in reps:
            for d, img in self.candidates(f, p):
                found.append((d, img, f, p, offset))
        if not found:
            raise RuntimeError(f"no source image sees point {point} of face {face}")
        dmin = min(x[0] for x in found)
        out: list[tuple[float, SourceImage, int, Point]] = []
        keys: list[float] = []
        period = reps[0][3] if len(reps[0]) > 3 else TWO_PI
        for d, img, f, p, offset in found:
            if d > dmin + eps:
                continue
            direction = math.atan2(img.position[1] - p[1], img.position[0] - p[0])
            key = _arrival_key(self.surface, f, p, direction, offset)
            if any(abs(_wrap_period(key - k, period)) < 1e-7 for k in keys):
                continue
            keys.append(key)
            out.append((d, img, f, p))
        return out


def _wrap_period(x: float, period: float) -> float:
    x = math.fmod(x, period)
    if x > 0.5 * period:
        x -= period
    elif x < -0.5 * period:
        x += period
    return x


def _arrival_key(surface: ConeSurface, face: int, p: Point, direction: float, offset) -> float:
    if offset is None:
        return direction
    kind, value = offset
    if kind == "plane":
        # value is the isometry into the reference chart; compare plane angles there
        return direction + value.angle
    # vertex: value = (corner, angle offset) -> angle around the vertex
    corner, base = value
    c = surface.charts[face]
    e = (c[(corner + 1) % 3][0] - c[corner][0], c[(corner + 1) % 3][1] - c[corner][1])
    rel = angle_between(e, (math.cos(direction), math.sin(direction)))
    return base + max(rel, 0.0)


def point_representations(surface: ConeSurface, face: int, point: Point,
                          tol: float | None = None) -> list[tuple]:
    """All (face, chart point, offset) tuples representing one surface point.

    ``offset`` is ``None`` for an interior point, ``("plane", iso)`` for a
    point on a side (``iso`` maps the chart into the reference face chart) or
    ``("vertex", (corner, angle offset))`` for a vertex; vertex tuples carry
    the cone angle as a fourth entry.
    """
    if tol is None:
        tol = 1e-9 * surface.max_edge_length()
    c = surface.charts[face]
    for i in range(3):
        if math.hypot(point[0] - c[i][0], point[1] - c[i][1]) <= tol:
            v = surface.vertex_of[face][i]
            theta = surface.cone_angle(v)
            out = []
            acc = 0.0
            for f, j in surface.star(face, i):
                out.append((f, surface.charts[f][j], ("vertex", (j, acc)), theta))
                acc += surface.corner_angle(f, j)
            return out
    for s in range(3):
        a, b = c[s], c[(s + 1) % 3]
        length = surface.lengths[face][s]
        t = ((point[0] - a[0]) * (b[0] - a[0]) + (point[1] - a[1]) * (b[1] - a[1])) / length
        h = ((b[0] - a[0]) * (point[1] - a[1]) - (b[1] - a[1]) * (point[0] - a[0])) / length
        if abs(h) <= tol and -tol <= t <= length + tol:
            g, _ = surface.twin[(face, s)]
            iso = surface.transition(face, s)
            return [
                (face, point, ("plane", PlanarIsometry.identity())),
                (g, iso(point), ("plane", iso.inverse())),
            ]
    return [(face, point, None)]


def _check_inside(surface: ConeSurface, face: int, point: Point) -> None:
    if not 0 <= face < surface.n_faces:
        raise KeyError(f"unknown face {face}")
    bary = surface.barycentric(face, point)
    if min(bary) < -1e-9:
        raise ValueError(f"point {point} lies outside face {face} (barycentric {bary})")


# --- propagation -----------------------------------------------------------

def propagate(surface: ConeSurface, source: int) -> GeodesicField:
    """Exact geodesic distance field from vertex ``source``."""
    problems = [v for v in validate(surface)]
    if problems:
        raise ValueError(f"surface is not a valid closed cone surface: {problems[0].detail}")
    if not 0 <= source < surface.n_vertices:
        raise KeyError(f"unknown vertex id {source}")
    return _Propagator(surface, source).run()


class _Propagator:
    def __init__(self, surface: ConeSurface, source: int):
        self.S = surface
        self.source = source
        self.scale = surface.max_edge_length()
        self.tau = 1e-12 * self.scale ** 2
        self.min_len = 1e-13 * self.scale
        self.storage: dict[HalfEdge, list[_Window]] = {}
        self.heap: list = []
        self.counter = itertools.count()
        self.windows: list[_Window] = []
        self.vertex_ub = [math.inf] * surface.n_vertices
        self.face_diam = [max(ls) for ls in surface.lengths]

    def edge_key(self, face: int, side: int) -> tuple[HalfEdge, bool]:
        other = self.S.twin[(face, side)]
        if (face, side) <= other:
            return (face, side), True
        return other, False

    def make_window(self, face: int, side: int, s: Point, local: list[tuple[float, float]],
                    witness, base, T, pseudo=False) -> _Window:
        """Window on side ``side`` of ``face`` with source image ``s`` in that face's chart."""
        w = _Window()
        w.face, w.side, w.s = face, side, s
        a, b = self.S.side_points(face, side)
        length = self.S.lengths[face][side]
        dx, dy = (b[0] - a[0]) / length, (b[1] - a[1]) / length
        u = (s[0] - a[0]) * dx + (s[1] - a[1]) * dy
        h = dx * (s[1] - a[1]) - dy * (s[0] - a[0])
        w.edge, w.canon = self.edge_key(face, side)
        w.length = length
        w.us = u if w.canon else length - u
        w.h2 = h * h
        if w.canon:
            w.intervals = sorted(local)
        else:
            w.intervals = sorted((length - hi, length - lo) for lo, hi in local)
        w.witness, w.base, w.T = witness, base, T
        w.alive, w.pseudo = True, pseudo
        return w

    def insert(self, w: _Window) -> None:
        olds = self.storage.setdefault(w.edge, [])
        tau = self.tau
        pieces = w.intervals
        for o in olds:
            if not pieces:
                break
            a = -2.0 * (w.us - o.us)
            b = w.us * w.us - o.us * o.us + w.h2 - o.h2
            for lo, hi in o.intervals:
                rng = _worse_region(a, b, tau, lo, hi)
                if rng is not None:
                    pieces = subtract_interval(pieces, *rng)
        pieces = [(lo, hi) for lo, hi in pieces if hi - lo > self.min_len]
        if not pieces:
            return
        w.intervals = pieces
        for o in olds:
            if o.pseudo or not o.intervals:
                continue
            a = -2.0 * (o.us - w.us)
            b = o.us * o.us - w.us * w.us + o.h2 - w.h2
            rest = o.intervals
            for lo, hi in pieces:
                rng = _worse_region(a, b, tau, lo, hi)
                if rng is not None:
                    rest = subtract_interval(rest, *rng)
            o.intervals = [(lo, hi) for lo, hi in rest if hi - lo > self.min_len]
        olds.append(w)
        if not w.pseudo:
            self.windows.append(w)
            heapq.heappush(self.heap, (w.min_distance(), next(self.counter), w))
            if len(self.windows) > MAX_WINDOWS:
                raise RuntimeError("window propagation did not terminate")

    def touch_vertex(self, face: int, corner: int, s: Point) -> None:
        v = self.S.vertex_of[face][corner]
        p = self.S.charts[face][corner]
        d = math.hypot(p[0] - s[0], p[1] - s[1])
        if d < self.vertex_ub[v]:
            self.vertex_ub[v] = d

    def run(self) -> GeodesicField:
        S = self.S
        corner_images: list[list[SourceImage]] = [[] for _ in range(S.n_faces)]
        self.vertex_ub[self.source] = 0.0
        seeds = []
        for f, i in S.corners_of(self.source):
            p = S.charts[f][i]
            ident = PlanarIsometry.identity()
            corner_images[f].append(SourceImage(f, p, None, (0.0, 0.0), (), (f, i), ident))
            for side in (i, (i + 2) % 3):
                self.insert(self.make_window(f, side, p, [(0.0, S.lengths[f][side])], (), (f, i), ident, True))
            opp = (i + 1) % 3
            for k in range(3):
                self.touch_vertex(f, k, p)
            seeds.append((f, i, opp, p))
        for f, i, opp, p in seeds:
            g, k = S.twin[(f, opp)]
            iso = S.transition(f, opp)
            self.insert(self.make_window(g, k, iso(p), [(0.0, S.lengths[g][k])], ((f, opp),), (f, i), iso))
        while self.heap:
            dmin, _, w = heapq.heappop(self.heap)
            if not w.intervals:
                continue
            dmin = w.min_distance()
            bound = min(self.vertex_ub[v] for v in S.vertex_of[w.face]) + self.face_diam[w.face] + EPS_PRUNE
            if dmin > bound:
                w.alive = False
                continue
            self.step(w)
        images = corner_images
        for w in self.windows:
            if not w.alive:
                continue
            for lo, hi in w.local_intervals():
                images[w.face].append(SourceImage(w.face, w.s, w.side, (lo, hi), w.witness, w.base, w.T))
        for f in range(S.n_faces):
            if not images[f]:
                raise RuntimeError(f"face {f} received no source image")
        return GeodesicField(S, self.source, images, len(self.windows))

    def step(self, w: _Window) -> None:
        S = self.S
        g, m = w.face, w.side
        c = S.charts[g]
        A, B, C = c[m], c[(m + 1) % 3], c[(m + 2) % 3]
        L = S.lengths[g][m]
        dx, dy = (B[0] - A[0]) / L, (B[1] - A[1]) / L
        sx, sy = w.s
        # the source image must lie strictly outside the entry side
        if dx * (sy - A[1]) - dy * (sx - A[0]) > -1e-12 * self.scale:
            return
        csx, csy = C[0] - sx, C[1] - sy
        denom = csx * dy - csy * dx
        t_c = -(csx * (A[1] - sy) - csy * (A[0] - sx)) / denom
        to_ca: list[tuple[float, float]] = []
        to_bc: list[tuple[float, float]] = []
        for lo, hi in w.local_intervals():
            if lo <= 1e-12 * L:
                self.touch_vertex(g, m, w.s)
            if hi >= L - 1e-12 * L:
                self.touch_vertex(g, (m + 1) % 3, w.s)
            if lo <= t_c <= hi:
                self.touch_vertex(g, (m + 2) % 3, w.s)
            if lo < t_c:
                to_ca.append((lo, min(hi, t_c)))
            if hi > t_c:
                to_bc.append((max(lo, t_c), hi))
        for side, parts in (((m + 2) % 3, to_ca), ((m + 1) % 3, to_bc)):
            if not parts:
                continue
            P, Q = c[side], c[(side + 1) % 3]
            Ls = S.lengths[g][side]
            ex, ey = (Q[0] - P[0]) / Ls, (Q[1] - P[1]) / Ls
            child = []
            for lo, hi in parts:
                vs = []
                for t in (lo, hi):
                    if side == (m + 2) % 3 and t >= t_c:
                        vs.append(0.0)
                        continue
                    if side == (m + 1) % 3 and t <= t_c:
                        vs.append(Ls)
                        continue
                    # a window end at the shared corner exits through that corner
                    if side == (m + 2) % 3 and t <= 1e-12 * L:
                        vs.append(Ls)
                        continue
                    if side == (m + 1) % 3 and t >= L - 1e-12 * L:
                        vs.append(0.0)
                        continue
                    rx, ry = A[0] + t * dx - sx, A[1] + t * dy - sy
                    den = rx * ey - ry * ex
                    v = -(rx * (P[1] - sy) - ry * (P[0] - sx)) / den
                    vs.append(min(max(v, 0.0), Ls))
                v0, v1 = min(vs), max(vs)
                if v1 - v0 > self.min_len:
                    child.append((v0, v1))
            if not child:
                continue
            h, k = S.twin[(g, side)]
            iso = S.transition(g, side)
            Lk = S.lengths[h][k]
            local = [(Lk - v1, Lk - v0) for v0, v1 in child]
            self.insert(self.make_window(h, k, iso(w.s), local, w.witness + ((g, side),), w.base, iso @ w.T))


def _worse_region(a: float, b: float, tau: float, lo: float, hi: float) -> tuple[float, float] | None:
    """Sub-interval of ``[lo, hi]`` where ``a*u + b > tau``."""
    if abs(a) < 1e-300:
        return (lo, hi) if b > tau else None
    u = (tau - b) / a
    if a > 0:
        lo = max(lo, u)
    else:
        hi = min(hi, u)
    return (lo, hi) if lo < hi else None


# --- module-level API --------------------------------------------------------

def distance(field: GeodesicField, face: int, point: Point) -> float:
    return field.distance(face, point)


def count_shortest_geodesics(field: GeodesicField, face: int, point: Point, eps: float | None = None) -> int:
    """Number of distinct shortest geodesics from the source to ``point``.

    ``eps`` defaults to ``TIE_REL`` times the larger of the field radius and
    the longest mesh edge.
    """
    if eps is None:
        eps = TIE_REL * max(field.radius(), field.surface.max_edge_length())
    return len(field.arrival_angles(face, point, eps))


def mark_distance_matrix(surface: ConeSurface, names: str = "abcd") -> list[list[float]]:
    """Geodesic distances between the marked vertices, one propagation per mark."""
    verts = [surface.marks[m] for m in names]
    return [[propagate(surface, v).vertex_distance(w) for w in verts] for v in verts]


# --- subdivision oracle -------------------------------------------------------

def _grid_key(surface: ConeSurface, f: int, i: int, j: int, k: int):
    b0 = k - i - j
    if (i, j) == (0, 0):
        return ("v", surface.vertex_of[f][0])
    if (i, j) == (k, 0):
        return ("v", surface.vertex_of[f][1])
    if (i, j) == (0, k):
        return ("v", surface.vertex_of[f][2])
    if j == 0:
        side, idx = 0, i
    elif b0 == 0:
        side, idx = 1, j
    elif i == 0:
        side, idx = 2, k - j
    else:
        return ("f", f, i, j)
    other = surface.twin.get((f, side))
    if other is None or (f, side) < other:
        return ("e", f, side, idx)
    return ("e", other[0], other[1], k - idx)


def oracle_distances(surface: ConeSurface, source: int, targets: Iterable, k: int) -> list[float]:
    """Dijkstra over k - 1 extra points per side, joined by every in-face chord.

    ``targets`` holds vertex ids or ``(face, point)`` pairs. Each result is the
    length of an actual path, so an upper bound on the geodesic distance, and
    it never increases when ``k`` is multiplied by an integer. A straight
    geodesic crosses each side within half a spacing of a node, which costs
    only a second-order amount of length.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    targets = list(targets)
    ids: dict = {}
    rows, cols, wts = [], [], []
    ring = [(i, 0) for i in range(k)] + [(k - j, j) for j in range(k)] + [(0, k - j) for j in range(k)]
    for f in range(surface.n_faces):
        c0, c1, c2 = surface.charts[f]
        pts = np.array([
            (c0[0] + (i * (c1[0] - c0[0]) + j * (c2[0] - c0[0])) / k,
             c0[1] + (i * (c1[1] - c0[1]) + j * (c2[1] - c0[1])) / k)
            for i, j in ring
        ])
        nodes = np.array([ids.setdefault(_grid_key(surface, f, i, j, k), len(ids)) for i, j in ring])
        iu, ju = np.triu_indices(len(ring), 1)
        rows.append(nodes[iu])
        cols.append(nodes[ju])
        wts.append(np.hypot(*(pts[iu] - pts[ju]).T))
        for t, tgt in enumerate(targets):
            if isinstance(tgt, tuple) and tgt[0] == f:
                node = ids.setdefault(("t", t), len(ids))
                p = np.asarray(tgt[1], dtype=float)
                rows.append(np.full(len(ring), node))
                cols.append(nodes)
                wts.append(np.hypot(*(pts - p).T))
    r = np.concatenate(rows)
    cidx = np.concatenate(cols)
    w = np.concatenate(wts)
    lo, hi = np.minimum(r, cidx), np.maximum(r, cidx)
    keep = lo != hi
    lo, hi, w = lo[keep], hi[keep], w[keep]
    order = np.lexsort((w, hi, lo))
    lo, hi, w = lo[order], hi[order], w[order]
    first = np.ones(len(lo), dtype=bool)
    first[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
    lo, hi, w = lo[first], hi[first], w[first]
    # zero-length chords (coincident points) must survive as explicit edges
    w = np.maximum(w, 1e-300)
    n = len(ids)
    graph = csr_matrix((w, (lo, hi)), shape=(n, n))
    src = ids[("v", source)]
    dist_all = dijkstra(graph, directed=False, indices=src)
    out = []
    for t, tgt in enumerate(targets):
        node = ids[("v", tgt)] if not isinstance(tgt, tuple) else ids[("t", t)]
        out.append(float(dist_all[node]))
    return out


def oracle_distance(surface: ConeSurface, source: int, target, k: int) -> float:
    return oracle_distances(surface, source, [target], k)[0]


def oracle_converged(surface: ConeSurface, source: int, targets: Iterable, k: int = 16,
                     rel: float = 5e-3, k_max: int = 512) -> tuple[list[float], int]:
    """Double ``k`` until two successive oracle runs agree within ``rel``; returns (distances, k)."""
    targets = list(targets)
    prev = oracle_distances(surface, source, targets, k)
    while True:
        if 2 * k > k_max:
            raise RuntimeError(f"oracle did not converge to {rel} by k={k_max}")
        cur = oracle_distances(surface, source, targets, 2 * k)
        k *= 2
        if all(abs(a - b) <= rel * max(b, 1e-300) for a, b in zip(prev, cur)):
            return cur, k
        prev = cur
