"""Classify a random sample of the parallelogram family plus the special parameters.

    python3 scripts/run_sweep.py --seed 2 --count 200 -o sweep_out

Random samples land almost surely on the generic four-vertex class. The
two- and three-vertex classes sit on the lines l1 == l2 with zero twist and
twist == h, so they are probed directly.
"""

from __future__ import annotations

import argparse
import math
import time
from pathlib import Path

from hexsphere.builders import ParallelogramParams, build_parallelogram_double, sample_family
from hexsphere.classify import catalog, classify
from hexsphere.render import dumps

SIN60 = math.sin(math.pi / 3)


def special_params() -> list[ParallelogramParams]:
    out = [ParallelogramParams(1.0, 1.0, 0.0), ParallelogramParams(2.0, 1.0, SIN60),
           ParallelogramParams(3.0, 1.5, 1.5 * SIN60)]
    # approach the untwisted square-ish case from inside the family
    out += [ParallelogramParams(1.0, 1.0, t) for t in (1e-3, 1e-2, 0.1)]
    out += [ParallelogramParams(2.0, 1.0, SIN60 + d) for d in (-1e-2, 1e-2)]
    return out


def run(params: list[ParallelogramParams]) -> list:
    reports = []
    for p in params:
        try:
            reports.append(classify(build_parallelogram_double(p), p))
        except Exception as exc:  # keep going, the catalog counts only successes
            print(f"  {p.to_dict()}: {type(exc).__name__}: {exc}")
    return reports


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=2)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("-o", "--output", type=Path, default=None)
    args = ap.parse_args()

    t0 = time.perf_counter()
    random_reports = run(sample_family(args.seed, args.count))
    elapsed = time.perf_counter() - t0
    cat = catalog(random_reports)
    print(f"random sample: {cat.n_passing}/{len(random_reports)} pass, {elapsed:.1f} s")
    for c in cat.classes:
        print(f"  p={c.p} {c.label} x{c.count}")

    print("special parameters:")
    special = run(special_params())
    for r in special:
        p = r.params
        print(f"  l1={p.l1:g} l2={p.l2:g} twist={p.twist:.6g}: p={r.p} q={r.q} "
              f"{r.label or 'checks failed'}")
    combined = catalog(random_reports + special)
    print(f"combined: {len(combined.classes)} class(es)")

    if args.output is not None:
        args.output.mkdir(parents=True, exist_ok=True)
        (args.output / "random_catalog.json").write_text(dumps(cat.to_dict()))
        (args.output / "combined_catalog.json").write_text(dumps(combined.to_dict()))
        (args.output / "special.json").write_text(dumps([r.to_dict() for r in special]))


if __name__ == "__main__":
    main()
