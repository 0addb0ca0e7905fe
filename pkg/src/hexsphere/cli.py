"""Command-line front end: ``hexsphere build | analyze | sweep | render``.

Exit codes: 0 success, 1 validation or check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_USAGE = 2


@dataclass
class RunConfig:
    subcommand: str
    input: str | None = None
    parallelogram: tuple[float, float, float] | None = None
    triangle_double: float | None = None
    seed: int = 0
    count: int = 1
    output: str | None = None
    jobs: int = 1
    tol_scale: float | None = None
    extras: dict = field(default_factory=dict)

    def check(self) -> None:
        if self.tol_scale is not None and not self.tol_scale > 0:
            raise UsageError(f"--tol-scale must be positive, got {self.tol_scale}")
        if self.subcommand == "sweep" and self.count < 1:
            raise UsageError(f"--count must be at least 1, got {self.count}")
        if self.jobs < 1:
            raise UsageError(f"--jobs must be at least 1, got {self.jobs}")


class UsageError(Exception):
    pass


def _diagnostic(kind: str, detail, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "detail": detail}, sort_keys=True) + "\n")
    return code


def _emit(text: str, path: str | Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _load_surface(path: str):
    from .cone_mesh import ConeSurface
    from .render import read_json

    data = read_json(path)
    if "surface" in data:
        data = data["surface"]
    return ConeSurface.from_dict(data)


def _validation_summary(surface) -> dict:
    from .builders import hex_sphere_problems
    from .cone_mesh import singular_locus, total_curvature_residual, validate

    return {
        "violations": [v.to_dict() for v in validate(surface)],
        "euler_characteristic": surface.euler_characteristic(),
        "singular": [{"vertex": r.vertex, "cone_angle": r.cone_angle} for r in singular_locus(surface)],
        "curvature_residual": total_curvature_residual(surface),
        "hex_sphere_problems": hex_sphere_problems(surface),
    }


def cmd_build(cfg: RunConfig) -> int:
    from .builders import (GluingError, GluingPattern, ParallelogramParams, build_from_gluing,
                           build_parallelogram_double, build_triangle_double)
    from .render import dumps, read_json

    try:
        if cfg.parallelogram is not None:
            l1, l2, t = cfg.parallelogram
            params = ParallelogramParams(l1, l2, t)
            params.check()
            surface = build_parallelogram_double(params)
        elif cfg.triangle_double is not None:
            surface = build_triangle_double(cfg.triangle_double)
        else:
            surface = build_from_gluing(GluingPattern.from_dict(read_json(cfg.input)))
    except GluingError as exc:
        return _diagnostic("invalid-gluing", str(exc), EXIT_USAGE)
    except ValueError as exc:
        kind = "parameter-order" if "parameter order" in str(exc) else "invalid-parameters"
        return _diagnostic(kind, str(exc), EXIT_USAGE)
    summary = _validation_summary(surface)
    _emit(dumps({"surface": surface.to_dict(), "validation": summary}), cfg.output)
    return EXIT_OK if not summary["violations"] else EXIT_CHECK


def _analysis(surface):
    from .classify import analyze

    return analyze(surface)


def cmd_analyze(cfg: RunConfig) -> int:
    from . import __version__
    from .classify import NotHexSphereError
    from .render import cell_svg, dumps, gamma_dot
    from .voronoi import CutLocusError

    surface = _load_surface(cfg.input)
    try:
        report, graph, cells = _analysis(surface)
    except NotHexSphereError as exc:
        return _diagnostic("not a hex sphere", exc.problems, EXIT_CHECK)
    except CutLocusError as exc:
        return _diagnostic("cut-locus", str(exc), EXIT_CHECK)
    doc = {"version": __version__, "report": report.to_dict()}
    if cfg.output is None:
        _emit(dumps(doc), None)
    else:
        out = Path(cfg.output)
        _emit(dumps(doc), out / "report.json")
        _emit(gamma_dot(graph), out / "gamma.dot")
        for m in "ab":
            _emit(cell_svg(cells[m]), out / f"cell_{m}.svg")
    return EXIT_OK if report.passed else EXIT_CHECK


def _sweep_one(params):
    from .builders import build_parallelogram_double
    from .classify import classify

    try:
        return classify(build_parallelogram_double(params), params), None
    except Exception as exc:  # a failed instance is reported, not fatal
        return None, f"{type(exc).__name__}: {exc}"


def cmd_sweep(cfg: RunConfig) -> int:
    from . import __version__
    from .builders import sample_family
    from .classify import catalog
    from .render import dumps

    family = sample_family(cfg.seed, cfg.count)
    if cfg.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(_sweep_one, family))
    else:
        results = [_sweep_one(p) for p in family]
    reports = [r for r, _ in results if r is not None]
    failures = [{"index": i, "params": p.to_dict(), "error": err}
                for i, (p, (r, err)) in enumerate(zip(family, results)) if err is not None]
    cat = catalog(reports)
    doc = {"version": __version__, "seed": cfg.seed, "count": cfg.count,
           "catalog": cat.to_dict(), "failures": failures}
    if cfg.output is None:
        _emit(dumps(doc), None)
    else:
        out = Path(cfg.output)
        _emit(dumps(doc), out / "catalog.json")
        for i, (r, err) in enumerate(results):
            body = r.to_dict() if r is not None else {"error": err, "params": family[i].to_dict()}
            _emit(dumps(body), out / "reports" / f"{i:04d}.json")
    ok = not failures and cat.n_passing == len(family)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_render(cfg: RunConfig) -> int:
    from .classify import NotHexSphereError
    from .render import cell_svg, gamma_dot
    from .voronoi import CutLocusError

    surface = _load_surface(cfg.input)
    try:
        _, graph, cells = _analysis(surface)
    except NotHexSphereError as exc:
        return _diagnostic("not a hex sphere", exc.problems, EXIT_CHECK)
    except CutLocusError as exc:
        return _diagnostic("cut-locus", str(exc), EXIT_CHECK)
    out = Path(cfg.output or ".")
    _emit(gamma_dot(graph), out / "gamma.dot")
    for m in "ab":
        _emit(cell_svg(cells[m]), out / f"cell_{m}.svg")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hexsphere", description=__doc__.splitlines()[0])
    parser.add_argument("--tol-scale", type=float, default=None,
                        help="multiply every tolerance (same as HEXSPHERE_TOL)")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="build a surface and write it as JSON")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--parallelogram", nargs=3, type=float, metavar=("L1", "L2", "TWIST"))
    src.add_argument("--triangle-double", type=float, metavar="SIDE")
    src.add_argument("--pattern", metavar="JSON", help="gluing pattern file")
    b.add_argument("-o", "--output", help="output file (default stdout)")

    a = sub.add_parser("analyze", help="classify a hex sphere")
    a.add_argument("input", help="surface JSON from `build`")
    a.add_argument("-o", "--output", help="directory for report.json, gamma.dot and cell SVGs")

    s = sub.add_parser("sweep", help="classify a random sample of the parallelogram family")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=50)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("-o", "--output", help="directory for catalog.json and reports/")

    r = sub.add_parser("render", help="write cell SVGs and the graph as DOT")
    r.add_argument("input")
    r.add_argument("-o", "--output", help="output directory (default .)")
    return parser


def parse_config(argv: Sequence[str] | None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(ns.subcommand, tol_scale=ns.tol_scale, output=getattr(ns, "output", None))
    if ns.subcommand == "build":
        cfg.parallelogram = tuple(ns.parallelogram) if ns.parallelogram else None
        cfg.triangle_double = ns.triangle_double
        cfg.input = ns.pattern
    elif ns.subcommand in ("analyze", "render"):
        cfg.input = ns.input
    else:
        cfg.seed, cfg.count, cfg.jobs = ns.seed, ns.count, ns.jobs
    cfg.check()
    return cfg


COMMANDS = {"build": cmd_build, "analyze": cmd_analyze, "sweep": cmd_sweep, "render": cmd_render}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        return _diagnostic("usage", str(exc), EXIT_USAGE)
    if cfg.tol_scale is not None:
        if "hexsphere.tolerances" in sys.modules:
            from .tolerances import scale

            if scale() != cfg.tol_scale:
                return _diagnostic("usage", "tolerance scale must be set before the library is loaded",
                                   EXIT_USAGE)
        os.environ["HEXSPHERE_TOL"] = repr(cfg.tol_scale)
    try:
        return COMMANDS[cfg.subcommand](cfg)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        return _diagnostic("input", f"{type(exc).__name__}: {exc}", EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
