"""Command-line entry point.

Exit codes: 0 success, 1 validation error, 2 solver failure, 3 bound violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import metric, sweep

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_BOUND = 0, 1, 2, 3


def _parse_params(text: str) -> dict:
    """Accept a JSON object or ``key=value,key=value``."""
    text = text.strip()
    if text.startswith("{"):
        return json.loads(text)
    out = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise sweep.SweepValidationError(f"expected key=value, got {item!r}")
        try:
            out[key.strip()] = json.loads(value)
        except json.JSONDecodeError:
            out[key.strip()] = value.strip()
    return out


def _print_report(report: sweep.AnalysisReport):
    print(json.dumps(report.as_dict(), indent=2, sort_keys=True))


def cmd_sweep(args) -> int:
    spec = sweep.SweepSpec.load(args.spec)
    records = sweep.run_sweep(spec)
    if args.csv:
        sweep.emit_csv(records, args.csv)
    else:
        print(",".join(sweep.CSV_HEADER))
        for r in records:
            print(",".join(r.row()))
    if len(records) >= 6:
        _print_report(sweep.analyze(records, spec.reference_params().n_particles))
    return EXIT_OK


def cmd_reproduce(args) -> int:
    summary = sweep.reproduce_fig2(args.outdir, log=lambda msg: print(msg, file=sys.stderr))
    for key, rep in summary["sweeps"].items():
        print(
            f"{key:18s} monotonic={rep['monotonic']!s:5s} initial_slope={rep['initial_slope']:.3f} "
            f"R2={rep['linear_r2']:.4f} tail_ratio={rep['tail_slope_ratio']:.3f} "
            f"max_D_psi/sqrt(2N)={rep['max_d_psi_norm']:.3f}"
        )
    sup = summary["superposition"]
    print(f"superposition {sup['curve_a']} vs {sup['curve_b']}: max deviation {sup['max_deviation']:.4f}")
    print(f"artifacts written to {args.outdir}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    records = sweep.read_csv(args.csv)
    n = args.n if args.n else sweep.particle_number(records)
    _print_report(sweep.analyze(records, n))
    return EXIT_OK


def cmd_distance(args) -> int:
    ref = _parse_params(args.ref)
    var = _parse_params(args.var)
    spec = sweep.SweepSpec(args.model, ref, [var])
    rec = sweep.run_sweep(spec)[0]
    n = spec.reference_params().n_particles
    print(
        json.dumps(
            {
                "N": n,
                "overlap": rec.overlap,
                "d_psi": rec.d_psi,
                "d_rho": rec.d_rho,
                "d_psi_max": math.sqrt(2 * n),
                "d_rho_max": 2.0 * n,
                "energy_ref": rec.energy_ref,
                "energy_var": rec.energy_var,
            },
            indent=2,
        )
    )
    return EXIT_OK


def cmd_plot(args) -> int:
    series = [(Path(p).stem, sweep.read_csv(p)) for p in args.csv]
    sweep.emit_svg({args.title: series}, args.svg, normalized=not args.raw)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmetric", description="Wave-function and density distances of model ground states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a sweep described by a JSON spec file")
    p.add_argument("--spec", required=True)
    p.add_argument("--csv", help="write records here instead of stdout")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce-fig2", help="run all preset sweeps and write CSV/SVG/JSON artifacts")
    p.add_argument("--outdir", default="fig2_output")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("analyze", help="shape statistics of a sweep CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--n", type=int, help="particle number (inferred from the CSV if omitted)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("distance", help="distances between two ground states of one model")
    p.add_argument("--model", required=True, choices=sorted(sweep.MODELS))
    p.add_argument("--ref", required=True, help='JSON object or key=value list, e.g. "omega=0.5"')
    p.add_argument("--var", required=True)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("plot", help="render sweep CSVs as an SVG")
    p.add_argument("--csv", required=True, nargs="+")
    p.add_argument("--svg", required=True)
    p.add_argument("--title", default="D_rho vs D_psi")
    p.add_argument("--raw", action="store_true", help="plot raw instead of normalized distances")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except metric.BoundViolation as exc:
        print(f"bound violation: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except sweep.SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
