"""Shared test utilities."""

import itertools
from dataclasses import dataclass

import networkx as nx

from hexsphere.builders import ParallelogramParams, build_parallelogram_double
from hexsphere.classify import Multigraph, analyze

SWEEP_SEED = 2
SWEEP_COUNT = 200


def small_multigraphs(max_vertices=4, max_edges=4):
    """Every multigraph (loops allowed) with 1..max_vertices vertices and at most max_edges edges."""
    for n in range(1, max_vertices + 1):
        pairs = list(itertools.combinations_with_replacement(range(n), 2))
        for m in range(max_edges + 1):
            for edges in itertools.combinations_with_replacement(pairs, m):
                yield Multigraph.from_edges(n, edges)


def to_networkx(g):
    out = nx.MultiGraph()
    out.add_nodes_from(range(g.n_vertices))
    out.add_edges_from(g.edges)
    return out


def canonical_agreement(canonical_form, max_vertices=4, max_edges=4):
    """Count disagreements between canonical forms and networkx isomorphism.

    Graphs sharing a form must be isomorphic to the first graph seen with
    that form; representatives of distinct forms must be pairwise
    non-isomorphic. Returns (graphs checked, forms, disagreements).
    """
    reps = {}
    bad = 0
    total = 0
    for g in small_multigraphs(max_vertices, max_edges):
        total += 1
        form = canonical_form(g)
        if form in reps:
            bad += not nx.is_isomorphic(reps[form], to_networkx(g))
        else:
            reps[form] = to_networkx(g)
    forms = list(reps)
    for i, f in enumerate(forms):
        for h in forms[i + 1:]:
            if f[0] == h[0] and len(f[1]) == len(h[1]):
                bad += nx.is_isomorphic(reps[f], reps[h])
    return total, len(forms), bad


ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record(number, name, passed, detail=""):
    """Remember one acceptance outcome; the terminal summary prints them all."""
    prev = ACCEPTANCE.get(number)
    if prev is not None:
        passed = passed and prev[1]
        detail = "; ".join(x for x in (prev[2], detail) if x)
    ACCEPTANCE[number] = (name, bool(passed), detail)
    return passed


@dataclass
class Instance:
    params: ParallelogramParams
    surface: object
    report: object
    graph: object
    cells: dict


def run_instance(params):
    surface = build_parallelogram_double(params)
    report, graph, cells = analyze(surface, params)
    return Instance(params, surface, report, graph, cells)
