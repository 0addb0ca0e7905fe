"""Planar Euclidean primitives: rigid motions and convex-polygon clipping.

Points are plain ``(x, y)`` tuples; the hot loops in the geodesic engine work
on Python floats, which is much faster than numpy for 2-vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

Point = tuple[float, float]
Polygon = list[Point]

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Reduce an angle to ``(-pi, pi]``."""
    theta = math.fmod(theta, TWO_PI)
    if theta <= -math.pi:
        theta += TWO_PI
    elif theta > math.pi:
        theta -= TWO_PI
    return theta


def sub(p: Point, q: Point) -> Point:
    return (p[0] - q[0], p[1] - q[1])


def cross(u: Point, v: Point) -> float:
    return u[0] * v[1] - u[1] * v[0]


def dot(u: Point, v: Point) -> float:
    return u[0] * v[0] + u[1] * v[1]


def norm(u: Point) -> float:
    return math.hypot(u[0], u[1])


def dist(p: Point, q: Point) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def angle_between(u: Point, v: Point) -> float:
    """Signed angle turning ``u`` into ``v``, in ``(-pi, pi]``."""
    return math.atan2(cross(u, v), dot(u, v))


@dataclass(frozen=True)
class PlanarIsometry:
    """Rigid motion ``x -> R(angle) F x + (tx, ty)``.

    ``F`` is the identity when ``orientation == 1`` and the reflection
    ``(x, y) -> (x, -y)`` when ``orientation == -1``.
    """

    angle: float = 0.0
    tx: float = 0.0
    ty: float = 0.0
    orientation: int = 1

    @classmethod
    def identity(cls) -> "PlanarIsometry":
        return cls()

    @classmethod
    def rotation(cls, theta: float, center: Point = (0.0, 0.0)) -> "PlanarIsometry":
        c, s = math.cos(theta), math.sin(theta)
        cx, cy = center
        return cls(wrap_angle(theta), cx - (c * cx - s * cy), cy - (s * cx + c * cy))

    @classmethod
    def translation(cls, vx: float, vy: float) -> "PlanarIsometry":
        return cls(0.0, vx, vy)

    @classmethod
    def from_segments(cls, a0: Point, b0: Point, a1: Point, b1: Point) -> "PlanarIsometry":
        """Direct isometry taking ``a0 -> a1`` and the direction ``a0b0`` onto ``a1b1``."""
        theta = math.atan2(b1[1] - a1[1], b1[0] - a1[0]) - math.atan2(b0[1] - a0[1], b0[0] - a0[0])
        c, s = math.cos(theta), math.sin(theta)
        return cls(
            wrap_angle(theta),
            a1[0] - (c * a0[0] - s * a0[1]),
            a1[1] - (s * a0[0] + c * a0[1]),
        )

    def linear(self, v: Point) -> Point:
        x, y = v[0], v[1] * self.orientation
        c, s = math.cos(self.angle), math.sin(self.angle)
        return (c * x - s * y, s * x + c * y)

    def __call__(self, p: Point) -> Point:
        x, y = self.linear(p)
        return (x + self.tx, y + self.ty)

    def apply_many(self, pts: Iterable[Point]) -> list[Point]:
        c, s = math.cos(self.angle), math.sin(self.angle)
        o, tx, ty = self.orientation, self.tx, self.ty
        return [(c * x - s * o * y + tx, s * x + c * o * y + ty) for x, y in pts]

    def __matmul__(self, other: "PlanarIsometry") -> "PlanarIsometry":
        """Composition ``self o other`` (apply ``other`` first)."""
        tx, ty = self((other.tx, other.ty))
        return PlanarIsometry(
            wrap_angle(self.angle + self.orientation * other.angle),
            tx,
            ty,
            self.orientation * other.orientation,
        )

    def inverse(self) -> "PlanarIsometry":
        angle = -self.orientation * self.angle
        inv = PlanarIsometry(wrap_angle(angle), 0.0, 0.0, self.orientation)
        x, y = inv.linear((self.tx, self.ty))
        return PlanarIsometry(inv.angle, -x, -y, self.orientation)

    def translation_vector(self) -> Point:
        return (self.tx, self.ty)

    def close_to(self, other: "PlanarIsometry", tol: float = 1e-12) -> bool:
        return (
            self.orientation == other.orientation
            and abs(wrap_angle(self.angle - other.angle)) <= tol
            and abs(self.tx - other.tx) <= tol
            and abs(self.ty - other.ty) <= tol
        )


# --- convex polygons -------------------------------------------------------

def polygon_area(poly: Sequence[Point]) -> float:
    """Signed area (positive for counterclockwise)."""
    n = len(poly)
    if n < 3:
        return 0.0
    acc = 0.0
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return 0.5 * acc


def clip_halfplane(poly: Sequence[Point], a: float, b: float, c: float) -> Polygon:
    """Keep the part of a convex polygon where ``a*x + b*y <= c``."""
    n = len(poly)
    if n == 0:
        return []
    out: Polygon = []
    vals = [a * x + b * y - c for x, y in poly]
    for i in range(n):
        p, vp = poly[i], vals[i]
        q, vq = poly[(i + 1) % n], vals[(i + 1) % n]
        if vp <= 0.0:
            out.append(p)
        if (vp < 0.0 < vq) or (vq < 0.0 < vp):
            t = vp / (vp - vq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def halfplanes_of(poly: Sequence[Point]) -> list[tuple[float, float, float]]:
    """Half-planes ``a*x + b*y <= c`` whose intersection is a CCW convex polygon."""
    planes = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        # interior lies to the left of p->q
        a, b = q[1] - p[1], -(q[0] - p[0])
        planes.append((a, b, a * p[0] + b * p[1]))
    return planes


def subtract_convex(pieces: Sequence[Polygon], planes: Sequence[tuple[float, float, float]],
                    min_area: float) -> list[Polygon]:
    """Remove the convex region ``{all planes hold}`` from a union of convex pieces.

    Output pieces overlap only along boundaries; slivers below ``min_area``
    are dropped.
    """
    out: list[Polygon] = []
    for piece in pieces:
        rest = list(piece)
        for a, b, c in planes:
            if len(rest) < 3:
                break
            outside = clip_halfplane(rest, -a, -b, -c)
            if len(outside) >= 3 and polygon_area(outside) > min_area:
                out.append(outside)
            rest = clip_halfplane(rest, a, b, c)
        # whatever remains in ``rest`` lies inside the removed region
    return out


def line_interval(poly: Sequence[Point], origin: Point, direction: Point,
                  tol: float) -> tuple[float, float] | None:
    """Parameter interval of ``origin + t*direction`` inside a CCW convex polygon.

    Each edge constraint is relaxed by ``tol`` (a distance). Returns ``None``
    when the line misses the polygon.
    """
    lo, hi = -math.inf, math.inf
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        ex, ey = q[0] - p[0], q[1] - p[1]
        le = math.hypot(ex, ey)
        if le == 0.0:
            continue
        # signed distance to the left of the edge must be >= -tol
        base = (ex * (origin[1] - p[1]) - ey * (origin[0] - p[0])) / le
        rate = (ex * direction[1] - ey * direction[0]) / le
        if abs(rate) < 1e-300:
            if base < -tol:
                return None
            continue
        t = (-tol - base) / rate
        if rate > 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
        if lo > hi:
            return None
    return (lo, hi)


def merge_intervals(intervals: Iterable[tuple[float, float]], gap: float = 0.0) -> list[tuple[float, float]]:
    out: list[list[float]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1] + gap:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(lo, hi) for lo, hi in out]


def intersect_intervals(xs: Sequence[tuple[float, float]], ys: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    out = []
    for a0, a1 in xs:
        for b0, b1 in ys:
            lo, hi = max(a0, b0), min(a1, b1)
            if lo < hi:
                out.append((lo, hi))
    return merge_intervals(out)


def subtract_interval(pieces: Sequence[tuple[float, float]], lo: float, hi: float) -> list[tuple[float, float]]:
    out = []
    for a, b in pieces:
        if hi <= a or lo >= b:
            out.append((a, b))
            continue
        if a < lo:
            out.append((a, lo))
        if hi < b:
            out.append((hi, b))
    return out


def point_in_convex(poly: Sequence[Point], p: Point, tol: float) -> bool:
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        ex, ey = b[0] - a[0], b[1] - a[1]
        le = math.hypot(ex, ey)
        if le == 0.0:
            continue
        if (ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / le < -tol:
            return False
    return True
