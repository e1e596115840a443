"""Command-line front end.

Subcommands: degree, lift, verify-lemma, generators, intersect-growth,
family, check-all.  Reports are deterministic for a fixed (argv, seed):
JSON output is canonical (sorted keys, compact separators) and wall-clock
timings only ever go to stderr.  Exit codes: 0 success, 1 property
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .checks import (
    CheckConfig,
    aggregate_report,
    canonical_json,
    run_criteria,
    regenerate_oracles,
)
from .degrees import (
    DELTA1,
    DELTA2,
    DELTA_MAX,
    ETA,
    UV_RING,
    XY_RING,
    WeightedDegree,
)
from .explorer import TruncationParams, new_generator_counts
from .family import FamilySpec, instantiate_family, validate_family
from .lifting import OMEGA, S_RING, SContext, descend_lift, drop_equivalence_scan
from .rings import PolyError, format_poly, parse_poly

_DEGREE_FUNCTIONS = {
    "omega": (WeightedDegree(OMEGA), S_RING),
    "delta1": (DELTA1, XY_RING),
    "delta2": (DELTA2, XY_RING),
    "max": (DELTA_MAX, XY_RING),
    "eta": (ETA, UV_RING),
}


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_degree(args) -> int:
    delta, ring = _DEGREE_FUNCTIONS[args.fn]
    value = delta.eval(parse_poly(args.poly, ring))
    print(value if isinstance(value, int) else "-inf")
    return 0


def _cmd_lift(args) -> int:
    ctx = SContext(args.i)
    f = parse_poly(args.poly, XY_RING)
    start = parse_poly(args.start, S_RING) if args.start else None
    result = descend_lift(ctx, f, start)
    doc = {
        "i": args.i,
        "input": format_poly(f),
        "lift": format_poly(result.lift),
        "omegaDegree": result.omega_degree,
        "deltaValue": result.delta_value,
        "steps": result.steps,
    }
    _emit(canonical_json(doc) + "\n", args.out)
    return 0


def _cmd_verify_lemma(args) -> int:
    indices = [args.i] if args.i else [1, 2]
    reports = {}
    ok = True
    for i in indices:
        report = drop_equivalence_scan(
            SContext(i), args.samples, seed=args.seed, omega_bound=args.omega_bound
        )
        reports[f"i{i}"] = report.to_json()
        ok = ok and report.ok
    doc = {"seed": args.seed, "samples": args.samples, "scans": reports, "ok": ok}
    _emit(canonical_json(doc) + "\n", args.out)
    return 0 if ok else 1


def _render_table(table, fmt: str) -> str:
    if fmt == "json":
        return canonical_json(table.to_json()) + "\n"
    if fmt == "csv":
        return table.to_csv()
    return table.to_markdown()


def _cmd_generators(args) -> int:
    delta, _ = _DEGREE_FUNCTIONS[args.fn]
    if args.fn in ("omega", "eta"):
        print("generators requires a shift-rewrite degree function", file=sys.stderr)
        return 2
    trunc = TruncationParams(d_max=args.dmax, N=args.N, delta_N=args.deltaN)
    table = new_generator_counts(delta, trunc, seed=args.seed)
    _emit(_render_table(table, args.format), args.out)
    return 0


def _cmd_intersect_growth(args) -> int:
    trunc = TruncationParams(d_max=args.dmax, N=args.N, delta_N=args.deltaN)
    tables = {
        name: new_generator_counts(delta, trunc, seed=args.seed)
        for name, delta in (("delta1", DELTA1), ("delta2", DELTA2), ("max", DELTA_MAX))
    }
    if args.format != "json":
        pieces = []
        for name, table in tables.items():
            pieces.append(f"# {name}\n" + _render_table(table, args.format))
        _emit("\n".join(pieces), args.out)
        return 0
    doc = {name: table.to_json() for name, table in tables.items()}
    _emit(canonical_json(doc) + "\n", args.out)
    return 0


def _cmd_family(args) -> int:
    data = json.loads(Path(args.family_file).read_text())
    spec = FamilySpec.from_json(data)
    violations = validate_family(spec)
    doc = {"spec": spec.to_json(), "violations": violations, "valid": not violations}
    if not violations:
        instance = instantiate_family(spec)
        doc["instance"] = instance.to_json()
    _emit(canonical_json(doc) + "\n", args.out)
    return 0 if not violations else 1


def _cmd_check_all(args) -> int:
    cfg = CheckConfig(
        seed=args.seed,
        d_max=args.dmax,
        N=args.N,
        delta_N=args.deltaN,
        oracle_dir=args.oracle_dir,
    )
    if args.samples:
        cfg.scan_samples = args.samples
        cfg.prop_samples = args.samples
        cfg.ext_samples = max(1, args.samples // 5)
        cfg.lift_samples = max(1, args.samples // 5)
        cfg.integral_samples = max(1, args.samples // 5)
    if args.tiny:
        cfg = CheckConfig.tiny(seed=args.seed)
        cfg.oracle_dir = args.oracle_dir
        cfg.compare_oracles = args.oracle_dir is not None
    if args.regen_oracles:
        for path in regenerate_oracles(cfg):
            print(f"wrote {path}", file=sys.stderr)
        return 0
    results = []
    for k in sorted(range(1, 11)):
        started = time.monotonic()
        result = run_criteria(cfg, [k])[0]
        elapsed = time.monotonic() - started
        state = "PASS" if result.passed else "FAIL"
        print(f"criterion {k:2d} [{state}] {result.name} ({elapsed:.1f}s)", file=sys.stderr)
        results.append(result)
    report = aggregate_report(cfg, results)
    _emit(report, args.out)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradus",
        description="Exact degree-function computations and finite-generation probes",
    )
    parser.add_argument("--version", action="version", version=f"gradus {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("degree", help="evaluate a degree function on a polynomial")
    p.add_argument("--fn", choices=sorted(_DEGREE_FUNCTIONS), required=True)
    p.add_argument("--poly", required=True)
    p.set_defaults(func=_cmd_degree)

    p = sub.add_parser("lift", help="descent-lift a polynomial into the presentation ring")
    p.add_argument("--poly", required=True)
    p.add_argument("--i", type=int, choices=(1, 2), default=1)
    p.add_argument("--start", help="optional starting lift in x,y,z1,z2")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_lift)

    p = sub.add_parser("verify-lemma", help="sample the degree-drop/membership biconditional")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--i", type=int, choices=(1, 2))
    p.add_argument("--omega-bound", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify_lemma)

    p = sub.add_parser("generators", help="new-generator table for one degree function")
    p.add_argument("--fn", choices=("delta1", "delta2", "max"), default="delta1")
    p.add_argument("--dmax", type=int, default=20)
    p.add_argument("--N", type=int, default=30)
    p.add_argument("--deltaN", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--format", choices=("json", "csv", "md"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_generators)

    p = sub.add_parser("intersect-growth", help="tables for both shifts and their max")
    p.add_argument("--dmax", type=int, default=20)
    p.add_argument("--N", type=int, default=30)
    p.add_argument("--deltaN", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--format", choices=("json", "csv", "md"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_intersect_growth)

    p = sub.add_parser("family", help="validate and instantiate a family member")
    p.add_argument("--family-file", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_family)

    p = sub.add_parser("check-all", help="run the full acceptance suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dmax", type=int, default=20)
    p.add_argument("--N", type=int, default=30)
    p.add_argument("--deltaN", type=int, default=10)
    p.add_argument("--samples", type=int, help="override sampling counts")
    p.add_argument("--tiny", action="store_true", help="reduced desk-check configuration")
    p.add_argument("--regen-oracles", action="store_true")
    p.add_argument("--oracle-dir")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_check_all)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PolyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
