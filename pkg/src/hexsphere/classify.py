"""Abstract Voronoi graphs, structural checks, cell isometry and the class catalog."""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .builders import ParallelogramParams, hex_sphere_problems
from .cone_mesh import ConeSurface
from .tolerances import ISO_REL, TIE_REL
from .voronoi import CutLocusGraph, VoronoiPolygon, compute_cut_locus, compute_fields, unfold_cells

__all__ = [
    "Multigraph",
    "Check",
    "GraphSummary",
    "ClassificationReport",
    "Catalog",
    "NotHexSphereError",
    "canonical_form",
    "structural_checks",
    "cells_isometric",
    "classify",
    "analyze",
    "catalog",
    "form_label",
]

MAX_CANON_VERTICES = 8
CORNER_ANGLE_TOL = 1e-9
ANGLE_SUM_TOL = 1e-6


class NotHexSphereError(ValueError):
    """The input surface is not a marked hex sphere."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("not a hex sphere: " + "; ".join(self.problems))


Edge = tuple[int, int]
Form = tuple[int, tuple[Edge, ...]]


@dataclass(frozen=True)
class Multigraph:
    """Vertex count and edge multiset; loops are pairs ``(v, v)``."""

    n_vertices: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        for u, v in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge {(u, v)} out of range for {self.n_vertices} vertices")

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable[Sequence[int]]) -> "Multigraph":
        return cls(n_vertices, tuple(sorted((min(u, v), max(u, v)) for u, v in edges)))

    def relabel(self, perm: Sequence[int]) -> "Multigraph":
        """Graph with vertex ``v`` renamed ``perm[v]``."""
        return Multigraph.from_edges(self.n_vertices, ((perm[u], perm[v]) for u, v in self.edges))

    def degrees(self) -> list[int]:
        deg = [0] * self.n_vertices
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg


def canonical_form(graph: Multigraph) -> Form:
    """Lexicographically smallest sorted edge list over all vertex relabelings."""
    n = graph.n_vertices
    if n > MAX_CANON_VERTICES:
        raise ValueError(f"canonical form supports at most {MAX_CANON_VERTICES} vertices, got {n}")
    best = None
    for perm in itertools.permutations(range(n)):
        edges = graph.relabel(perm).edges
        if best is None or edges < best:
            best = edges
    return (n, best if best is not None else ())


def form_label(form: Form) -> str:
    n, edges = form
    return f"V{n}:" + ",".join(f"{u}-{v}" for u, v in edges)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float = 0.0
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "residual": self.residual, "detail": self.detail}


@dataclass(frozen=True)
class GraphSummary:
    """The combinatorial data the structural checks need."""

    graph: Multigraph
    p: int
    q: int
    marks: tuple[str | None, ...]
    equidistance_gap: tuple[float, ...]  # |d(a, v) - d(b, v)| per vertex
    tie_tol: float

    @classmethod
    def from_cut_locus(cls, g: CutLocusGraph) -> "GraphSummary":
        return cls(
            Multigraph.from_edges(g.n_vertices, g.edge_pairs()),
            g.p,
            g.q,
            tuple(v.mark for v in g.vertices),
            tuple(abs(v.dist_a - v.dist_b) for v in g.vertices),
            TIE_REL * g.diameter,
        )


def _components(graph: Multigraph) -> int:
    parent = list(range(graph.n_vertices))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for u, v in graph.edges:
        parent[find(u)] = find(v)
    return len({find(i) for i in range(graph.n_vertices)})


def num_cond(p: int, q: int) -> bool:
    return p >= 2 and q >= 2 and (p + q) % 2 == 0 and p + q <= 8


def structural_checks(graph: CutLocusGraph | GraphSummary,
                      cells: Mapping[str, VoronoiPolygon] | None = None) -> list[Check]:
    """Every combinatorial constraint on the Voronoi graph, plus cell-angle checks if cells are given."""
    s = graph if isinstance(graph, GraphSummary) else GraphSummary.from_cut_locus(graph)
    g = s.graph
    deg = g.degrees()
    n, e = g.n_vertices, len(g.edges)
    checks = [Check("num_cond", num_cond(s.p, s.q), detail=f"p={s.p} q={s.q}")]
    checks.append(Check("p_equals_q", s.p == s.q, float(abs(s.p - s.q))))
    half = (s.p + s.q) / 2
    checks.append(Check("vertex_edge_count", n == e == half, detail=f"V={n} E={e} (p+q)/2={half:g}"))
    b1 = e - n + _components(g)
    checks.append(Check("unique_cycle", b1 == 1 and _components(g) == 1,
                        detail=f"b1={b1} components={_components(g)}"))
    low = [v for v in range(n) if deg[v] <= 2]
    ok = len(low) <= 2 and all(s.marks[v] in ("c", "d") for v in low)
    checks.append(Check("degree_bound", ok, detail=f"low-degree vertices {low}"))
    ones = [s.equidistance_gap[v] for v in range(n) if deg[v] == 1]
    gap = min(ones) if ones else math.inf
    checks.append(Check("degree_one_not_equidistant", all(x > s.tie_tol for x in ones),
                        gap if ones else 0.0))
    if cells is not None:
        worst = max(max(c.corner_angles) for c in cells.values())
        checks.append(Check("corner_angles_at_most_pi", worst <= math.pi + CORNER_ANGLE_TOL,
                            max(0.0, worst - math.pi)))
        sums: dict[int, float] = defaultdict(float)
        for c in cells.values():
            for v, ang in zip(c.gamma_vertices, c.corner_angles):
                sums[v] += ang
        if isinstance(graph, CutLocusGraph):
            res = max(abs(sums[v] - graph.vertices[v].cone_angle) for v in range(n))
            checks.append(Check("vertex_angle_sums", res <= ANGLE_SUM_TOL, res))
        checks.append(_distinguished_corner_check(s.p, cells))
    return checks


def _distinguished_corner_check(p: int, cells: Mapping[str, VoronoiPolygon]) -> Check:
    """Each cell has a corner of angle pi/3 (p = 2, both corners) or 2pi/3 (p = 3, 4)."""
    worst = 0.0
    for c in cells.values():
        if p == 2:
            res = max(abs(a - math.pi / 3) for a in c.corner_angles)
        else:
            res = min(abs(a - 2 * math.pi / 3) for a in c.corner_angles)
        worst = max(worst, res)
    return Check("distinguished_corner", worst <= ANGLE_SUM_TOL, worst)


def _cell_tokens(cell: VoronoiPolygon) -> list[tuple[str, float]]:
    out = []
    for ang, length in zip(cell.corner_angles, cell.edge_lengths):
        out.append(("angle", ang))
        out.append(("length", length))
    return out


def cells_isometric(cell_a: VoronoiPolygon, cell_b: VoronoiPolygon,
                    diameter: float | None = None) -> tuple[bool, float]:
    """Compare cyclic (corner angle, edge length) sequences up to rotation and reflection.

    Angle mismatches are turned into lengths by the largest corner radius,
    so the residual is a displacement. The cells count as isometric when the
    best alignment is within ``ISO_REL * diameter``.
    """
    radius = max(r for cell in (cell_a, cell_b) for r, _ in cell.corners)
    scale = diameter if diameter is not None else radius
    tol = ISO_REL * scale
    apex = radius * abs(cell_a.sector.apex_angle - cell_b.sector.apex_angle)
    if cell_a.n_edges != cell_b.n_edges:
        return False, math.inf
    ta, tb = _cell_tokens(cell_a), _cell_tokens(cell_b)
    rev = tb[::-1]
    candidates = [tb[k:] + tb[:k] for k in range(0, len(tb), 2)]
    # reversed list starts with a length, shift by one to start at a corner
    candidates += [rev[k:] + rev[:k] for k in range(1, len(rev), 2)]
    best = math.inf
    for cand in candidates:
        res = apex
        for (kind, x), (kind2, y) in zip(ta, cand):
            assert kind == kind2
            res = max(res, abs(x - y) * (radius if kind == "angle" else 1.0))
        best = min(best, res)
    return best < tol, best


@dataclass
class ClassificationReport:
    p: int
    q: int
    relabeled: bool
    form: Form
    checks: list[Check]
    isometric: bool
    iso_residual: float
    label: str | None
    diameter: float
    degrees: tuple[int, ...]
    edge_lengths: tuple[float, ...]
    corner_angles: dict[str, tuple[float, ...]]
    params: ParallelogramParams | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.isometric

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict() if self.params else None,
            "p": self.p,
            "q": self.q,
            "relabeled": self.relabeled,
            "form": {"n_vertices": self.form[0], "edges": [list(e) for e in self.form[1]]},
            "label": self.label,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "isometric": self.isometric,
            "iso_residual": self.iso_residual,
            "diameter": self.diameter,
            "degrees": list(self.degrees),
            "edge_lengths": list(self.edge_lengths),
            "corner_angles": {k: list(v) for k, v in self.corner_angles.items()},
        }


def classify(surface: ConeSurface, params: ParallelogramParams | None = None) -> ClassificationReport:
    """Fields, cut locus, cells, checks and canonical form for one hex sphere."""
    return analyze(surface, params)[0]


def analyze(surface: ConeSurface, params: ParallelogramParams | None = None
            ) -> tuple[ClassificationReport, CutLocusGraph, dict[str, VoronoiPolygon]]:
    """Like :func:`classify`, also returning the graph and the two cells."""
    problems = hex_sphere_problems(surface)
    if problems:
        raise NotHexSphereError(problems)
    fields = compute_fields(surface)
    graph = compute_cut_locus(surface, fields)
    cells = unfold_cells(surface, graph)
    checks = structural_checks(graph, cells)
    ok, residual = cells_isometric(cells["a"], cells["b"], graph.diameter)
    p, q = graph.p, graph.q
    relabeled = p > q
    if relabeled:
        p, q = q, p
    form = canonical_form(Multigraph.from_edges(graph.n_vertices, graph.edge_pairs()))
    passed = all(c.passed for c in checks) and ok
    report = ClassificationReport(
        p=p, q=q, relabeled=relabeled, form=form, checks=checks, isometric=ok,
        iso_residual=residual, label=form_label(form) if passed else None,
        diameter=graph.diameter, degrees=tuple(sorted(graph.degrees())),
        edge_lengths=tuple(sorted(e.length for e in graph.edges)),
        corner_angles={m: cells[m].corner_angles for m in "ab"}, params=params,
    )
    return report, graph, cells


@dataclass
class CatalogEntry:
    label: str
    form: Form
    p: int
    count: int
    example: ParallelogramParams | None

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "p": self.p,
            "n_vertices": self.form[0],
            "edges": [list(e) for e in self.form[1]],
            "count": self.count,
            "example": self.example.to_dict() if self.example else None,
        }


@dataclass
class Catalog:
    classes: list[CatalogEntry] = field(default_factory=list)
    n_reports: int = 0
    n_passing: int = 0

    @property
    def pass_rate(self) -> float:
        return self.n_passing / self.n_reports if self.n_reports else 1.0

    @property
    def forms(self) -> list[Form]:
        return [c.form for c in self.classes]

    def to_dict(self) -> dict:
        return {
            "n_reports": self.n_reports,
            "n_passing": self.n_passing,
            "pass_rate": self.pass_rate,
            "classes": [c.to_dict() for c in self.classes],
        }


def catalog(reports: Sequence[ClassificationReport]) -> Catalog:
    """Group passing reports by canonical form; classes sorted by (p, form)."""
    groups: dict[tuple[int, Form], list[ClassificationReport]] = {}
    passing = 0
    for r in reports:
        if not r.passed:
            continue
        passing += 1
        groups.setdefault((r.p, r.form), []).append(r)
    classes = [CatalogEntry(form_label(form), form, p, len(rs), rs[0].params)
               for (p, form), rs in sorted(groups.items())]
    return Catalog(classes, len(reports), passing)
