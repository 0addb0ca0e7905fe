"""Developing map along face chains and holonomy of loops around cone points."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .cone_mesh import ConeSurface
from .geodesics import GeodesicField, propagate
from .planar import PlanarIsometry, Point, wrap_angle

__all__ = [
    "FaceChain",
    "HolonomyElement",
    "develop",
    "loop_holonomy",
    "composite_holonomy",
    "geodesic_composite_holonomy",
    "check_distance_identities",
    "classify_isometry",
]


@dataclass(frozen=True)
class FaceChain:
    """Path in the dual graph: leave ``base`` through the listed (face, side) crossings."""

    base: int
    crossings: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_faces(cls, surface: ConeSurface, faces: Sequence[int]) -> "FaceChain":
        """Chain through consecutive faces, crossing the lowest shared side each time."""
        if not faces:
            raise ValueError("empty face sequence")
        crossings = []
        for f, g in zip(faces, faces[1:]):
            side = next((s for s in range(3) if surface.twin[(f, s)][0] == g), None)
            if side is None:
                raise ValueError(f"faces {f} and {g} are not adjacent")
            crossings.append((f, side))
        return cls(faces[0], tuple(crossings))

    def faces(self, surface: ConeSurface) -> list[int]:
        out = [self.base]
        for f, s in self.crossings:
            out.append(surface.twin[(f, s)][0])
        return out

    def end(self, surface: ConeSurface) -> int:
        return self.faces(surface)[-1]

    def reversed(self, surface: ConeSurface) -> "FaceChain":
        back = tuple(surface.twin[c] for c in reversed(self.crossings))
        return FaceChain(self.end(surface), back)

    def __add__(self, other: "FaceChain") -> "FaceChain":
        return FaceChain(self.base, self.crossings + other.crossings)


@dataclass(frozen=True)
class HolonomyElement:
    isometry: PlanarIsometry
    kind: str  # "rotation" | "translation" | "identity" | "reflecting"
    center: Point | None = None
    angle: float = 0.0
    vector: Point | None = None

    @property
    def translation_length(self) -> float:
        return math.hypot(*self.vector) if self.vector is not None else 0.0


def classify_isometry(iso: PlanarIsometry, tol: float = 1e-9) -> HolonomyElement:
    if iso.orientation == -1:
        return HolonomyElement(iso, "reflecting")
    theta = wrap_angle(iso.angle)
    if abs(theta) <= tol:
        if math.hypot(iso.tx, iso.ty) <= tol:
            return HolonomyElement(iso, "identity")
        return HolonomyElement(iso, "translation", vector=(iso.tx, iso.ty))
    # fixed point: (I - R) c = t
    c, s = math.cos(theta), math.sin(theta)
    a11, a12, a21, a22 = 1 - c, s, -s, 1 - c
    det = a11 * a22 - a12 * a21
    cx = (a22 * iso.tx - a12 * iso.ty) / det
    cy = (-a21 * iso.tx + a11 * iso.ty) / det
    return HolonomyElement(iso, "rotation", center=(cx, cy), angle=theta % (2 * math.pi))


def develop(surface: ConeSurface, chain: FaceChain) -> PlanarIsometry:
    """Isometry from the chart of the chain's last face into the base chart."""
    iso = PlanarIsometry.identity()
    for f, s in chain.crossings:
        if (f, s) not in surface.twin:
            raise ValueError(f"side {s} of face {f} is not glued")
        iso = iso @ surface.transition(f, s).inverse()
    return iso


def _dual_path(surface: ConeSurface, start: int, goals: set[int]) -> FaceChain:
    """Shortest dual path (fewest crossings, lowest sides first) into ``goals``."""
    prev: dict[int, tuple[int, int] | None] = {start: None}
    queue = deque([start])
    while queue:
        f = queue.popleft()
        if f in goals:
            crossings = []
            while prev[f] is not None:
                crossings.append(prev[f])
                f = prev[f][0]
            return FaceChain(start, tuple(reversed(crossings)))
        for s in range(3):
            g = surface.twin[(f, s)][0]
            if g not in prev:
                prev[g] = (f, s)
                queue.append(g)
    raise ValueError(f"no dual path from face {start}")


def vertex_loop(surface: ConeSurface, face: int, corner: int, reverse: bool = False) -> FaceChain:
    """Closed chain around the vertex at ``corner`` of ``face``, counterclockwise by default."""
    star = surface.star(face, corner)
    crossings = []
    for f, i in star:
        # the next face of the counterclockwise star lies across side (i + 2) % 3
        crossings.append((f, (i + 2) % 3))
    chain = FaceChain(face, tuple(crossings))
    return chain.reversed(surface) if reverse else chain


def _loop_isometry(surface: ConeSurface, vertex: int, approach: FaceChain, reverse: bool) -> PlanarIsometry:
    end = approach.end(surface)
    corner = surface.vertex_of[end].index(vertex)
    local = develop(surface, vertex_loop(surface, end, corner, reverse))
    to_base = develop(surface, approach)
    return to_base @ local @ to_base.inverse()


def loop_holonomy(surface: ConeSurface, around: int, base_face: int, reverse: bool = False) -> HolonomyElement:
    """Holonomy of the loop based at ``base_face`` that encircles only ``around``.

    The loop runs along a shortest dual path to a face of the vertex star,
    once around the star, and back.
    """
    if not 0 <= around < surface.n_vertices:
        raise KeyError(f"unknown vertex id {around}")
    if not 0 <= base_face < surface.n_faces:
        raise KeyError(f"unknown face {base_face}")
    star_faces = {f for f, _ in surface.corners_of(around)}
    approach = _dual_path(surface, base_face, star_faces)
    return classify_isometry(_loop_isometry(surface, around, approach, reverse),
                             1e-9 * max(1.0, surface.max_edge_length()))


def _shortest_witness(surface: ConeSurface, first: int, second: int, field: GeodesicField | None):
    if field is None or field.source != first:
        field = propagate(surface, first)
    best = None
    for f, i in surface.corners_of(second):
        for d, img in field.candidates(f, surface.charts[f][i]):
            key = (round(d, 12), img.base, img.witness)
            if best is None or key < best[0]:
                best = (key, d, img)
    if best is None:
        raise RuntimeError(f"no geodesic from {first} to {second}")
    return best[1], best[2]


def geodesic_composite_holonomy(surface: ConeSurface, first: int, second: int,
                                field: GeodesicField | None = None
                                ) -> tuple[HolonomyElement, float, int]:
    """hol(first) o hol(second) for loops hugging a shortest geodesic between the two.

    Returns the holonomy in the chart of the face where the geodesic leaves
    ``first``, the geodesic length and that face.
    """
    length, img = _shortest_witness(surface, first, second, field)
    base_face = img.base[0]
    iso = (_loop_isometry(surface, first, FaceChain(base_face), False)
           @ _loop_isometry(surface, second, FaceChain(base_face, img.witness), False))
    return classify_isometry(iso, 1e-9 * max(1.0, surface.max_edge_length())), length, base_face


def composite_holonomy(surface: ConeSurface, around_first: int, around_second: int,
                       base_face: int, field: GeodesicField | None = None) -> HolonomyElement:
    """hol(first) o hol(second) with both loops based at ``base_face``.

    Both loops reach their cone points along a shortest geodesic joining
    them, so for a 4pi/3 and a 2pi/3 point the result is a translation of
    length sqrt(3) times their distance.
    """
    if not 0 <= base_face < surface.n_faces:
        raise KeyError(f"unknown face {base_face}")
    for v in (around_first, around_second):
        if not 0 <= v < surface.n_vertices:
            raise KeyError(f"unknown vertex id {v}")
    hol, _, start = geodesic_composite_holonomy(surface, around_first, around_second, field)
    conj = develop(surface, _dual_path(surface, base_face, {start}))
    return classify_isometry(conj @ hol.isometry @ conj.inverse(),
                             1e-9 * max(1.0, surface.max_edge_length()))


def check_distance_identities(surface: ConeSurface, fields: dict[str, GeodesicField] | None = None
                              ) -> tuple[float, float]:
    """(|d(a,d) - d(b,c)|, |d(a,c) - d(b,d)|) from the fields at a and b."""
    marks = surface.marks
    missing = [m for m in "abcd" if m not in marks]
    if missing:
        raise ValueError(f"marks missing: {missing}")
    fields = dict(fields or {})
    for m in "ab":
        if m not in fields:
            fields[m] = propagate(surface, marks[m])
    fa, fb = fields["a"], fields["b"]
    r1 = abs(fa.vertex_distance(marks["d"]) - fb.vertex_distance(marks["c"]))
    r2 = abs(fa.vertex_distance(marks["c"]) - fb.vertex_distance(marks["d"]))
    return r1, r2
