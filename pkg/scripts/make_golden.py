"""Regenerate the files under tests/golden.

Oracle distances come from the subdivision Dijkstra oracle only, never from
the window propagation they are used to check.

    python3 scripts/make_golden.py
"""

from __future__ import annotations

import argparse
from pathlib import Path

from hexsphere.builders import ParallelogramParams, build_parallelogram_double, build_triangle_double
from hexsphere.classify import analyze, catalog, classify
from hexsphere.builders import sample_family
from hexsphere.geodesics import oracle_converged
from hexsphere.render import cell_svg, dumps, gamma_dot

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "golden"

ORACLE_CASES = {
    "parallelogram_1_1_0": (1.0, 1.0, 0.0),
    "parallelogram_2_1_0": (2.0, 1.0, 0.0),
    "parallelogram_2_1_0.3": (2.0, 1.0, 0.3),
}


def oracle_matrix(surface, names):
    verts = [surface.marks[m] for m in names] if names else list(range(surface.n_vertices))
    rows, ks = [], []
    for v in verts:
        dist, k = oracle_converged(surface, v, verts)
        rows.append(dist)
        ks.append(k)
    return rows, max(ks)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=2)
    ap.add_argument("--count", type=int, default=200)
    args = ap.parse_args()
    GOLDEN.mkdir(parents=True, exist_ok=True)

    oracle = {}
    tri = build_triangle_double(1.0)
    rows, k = oracle_matrix(tri, None)
    oracle["triangle_double_1"] = {"order": "vertex id", "matrix": rows, "k": k}
    for name, (l1, l2, t) in ORACLE_CASES.items():
        rows, k = oracle_matrix(build_parallelogram_double(ParallelogramParams(l1, l2, t)), "abcd")
        oracle[name] = {"order": "abcd", "params": [l1, l2, t], "matrix": rows, "k": k}
    (GOLDEN / "oracle_distances.json").write_text(dumps(oracle))

    reports = [classify(build_parallelogram_double(p), p) for p in sample_family(args.seed, args.count)]
    cat = catalog(reports).to_dict()
    cat["seed"], cat["count"] = args.seed, args.count
    (GOLDEN / f"catalog_seed{args.seed}_{args.count}.json").write_text(dumps(cat))

    special = {
        "p2": ParallelogramParams(1.0, 1.0, 0.0),
        "p3": ParallelogramParams(2.0, 1.0, ParallelogramParams(2.0, 1.0, 0.0).height),
        "p4": ParallelogramParams(2.0, 1.0, 0.3),
    }
    forms = {}
    for name, p in special.items():
        report, graph, cells = analyze(build_parallelogram_double(p), p)
        forms[name] = {"params": p.to_dict(), "p": report.p, "q": report.q,
                       "n_vertices": report.form[0], "edges": [list(e) for e in report.form[1]]}
        (GOLDEN / f"{name}_gamma.dot").write_text(gamma_dot(graph))
        for m in "ab":
            (GOLDEN / f"{name}_cell_{m}.svg").write_text(cell_svg(cells[m]))
    (GOLDEN / "class_forms.json").write_text(dumps(forms))
    print(f"wrote golden files to {GOLDEN}")


if __name__ == "__main__":
    main()
