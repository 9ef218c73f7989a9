"""Umbrella command-line interface.

Exit codes: 0 success, 2 configuration/usage error, 3 stage failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STAGE = 3


def _cmd_enumerate(args):
    from . import enumeration

    counts = enumeration.saw_counts(args.n)
    reduced = [enumeration.enumerate_saws_reduced(k).count
               for k in range(1, args.n + 1)]
    if counts != reduced:
        print("enumerator disagreement!", file=sys.stderr)
        return EXIT_STAGE
    for k, c in enumerate(counts, start=1):
        print(f"c_{k} = {c}")
    return EXIT_OK


def _cmd_pivot(args):
    from .pivot import PivotChain

    chain = PivotChain(args.n, args.ensemble, seed=args.seed)
    acc = chain.advance(args.attempts)
    print(f"attempts={args.attempts} accepted={acc} rate={acc / args.attempts:.4f}")
    return EXIT_OK


def _cmd_correction(args):
    from . import correction, pipeline

    grid = correction.default_theta_grid(args.theta_step)
    est = correction.estimate_p2 if args.which == 2 else correction.estimate_p1
    table = est(grid, args.n, args.samples, stride=args.stride, seed=args.seed)
    lcorr = correction.assemble_l(table)
    pipeline.write_correction_csv(Path(args.out), table, lcorr)
    print(f"wrote {args.out}: {len(grid)} angles, N={args.n}, "
          f"{table.n_samples} samples")
    return EXIT_OK


def _cmd_cutcurve(args):
    from . import cutcurve, pipeline

    kind = "circle" if args.geometry == "disc" else "semicircle_upper"
    ensemble = "free" if args.geometry == "disc" else "halfplane"
    curve = cutcurve.CutCurve(kind, args.R)
    run = cutcurve.sample_cutcurve(ensemble, curve, args.n, args.samples,
                                   stride=args.stride, seed=args.seed)
    out = Path(args.out)
    pipeline.write_samples_csv(out, run)
    sidecar = out.with_suffix(".json")
    sidecar.write_text(json.dumps(
        {"acceptance_fraction": run.acceptance_fraction, "config": run.config},
        indent=2, sort_keys=True) + "\n")
    print(f"accepted {len(run.samples)}/{run.n_proposed} "
          f"({run.acceptance_fraction:.3f}); wrote {out} and {sidecar}")
    return EXIT_OK


def _cmd_theory(args):
    import csv

    from . import pipeline, theory

    correction = None
    if args.correction:
        with open(args.correction, newline="") as fh:
            rows = list(csv.DictReader(fh))
        grid = [float(r["theta_deg"]) for r in rows]
        lvals = [float(r["l"]) for r in rows]
        correction = theory.periodic_interpolator(grid, lvals, period=90.0)
    step = args.theta_step
    hi = 90.0 if args.geometry == "disc" else 180.0
    grid = np.arange(0.0, hi + 0.5 * step, step)
    uncorr, corrd = pipeline.theory_cdfs(args.geometry, grid, correction)
    tag = "disc_center" if args.geometry == "disc" else "halfplane_semicircle"
    dens = theory.theoretical_density(tag, correction)
    dvals = dens.density(np.radians(np.clip(grid, 1e-9, None)))
    pipeline._write_csv(Path(args.out), ["angle_deg", "density", "cdf"],
                        zip(grid, dvals, corrd if correction else uncorr))
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_lerw_check(args):
    from . import loops

    domain = loops.FiniteDomain.rectangle(args.width, args.height)
    origin = (args.width // 2, args.height // 2)
    z = loops.lambda_partition_function(domain, args.c, args.beta,
                                        origin=origin, endpoint_resolved=True)
    report = {
        "domain": f"{args.width}x{args.height}",
        "origin": list(origin),
        "c": args.c,
        "beta": args.beta,
        "partition_function": sum(z.values()),
    }
    if args.c == -2.0 and args.beta == 0.25:
        hm = loops.discrete_harmonic_measure(domain, origin)
        report["max_abs_error_vs_harmonic_measure"] = max(
            abs(z[k] - hm[k]) for k in hm)
    Path(args.out).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_experiment(args):
    from . import pipeline

    try:
        config = pipeline.RunConfig.from_json(Path(args.config).read_text())
    except (OSError, ValueError, TypeError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        summary = pipeline.run_experiment(config, args.out_dir)
    except pipeline.StageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_STAGE
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def _check_threads(args) -> None:
    threads = getattr(args, "threads", 1)
    if threads < 1:
        raise ValueError("--threads must be >= 1")
    if threads > 1:
        print("note: single-process build; --threads > 1 has no effect",
              file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sawlab",
                                description="Self-avoiding walk laboratory")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads (advisory; this build is serial)")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("enumerate", help="exact SAW counts by dual enumerators")
    q.add_argument("--n", type=int, default=10)
    q.set_defaults(fn=_cmd_enumerate)

    q = sub.add_parser("pivot", help="run a pivot chain and report acceptance")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--ensemble", choices=["free", "halfplane", "midbond"],
                   default="free")
    q.add_argument("--attempts", type=int, default=100_000)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(fn=_cmd_pivot)

    q = sub.add_parser("correction", help="estimate a lattice correction table")
    q.add_argument("--which", type=int, choices=[1, 2], default=2)
    q.add_argument("--n", type=int, default=101)
    q.add_argument("--samples", type=int, default=200_000)
    q.add_argument("--theta-step", type=float, default=1.0)
    q.add_argument("--stride", type=int, default=4)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(fn=_cmd_correction)

    q = sub.add_parser("cutcurve", help="sample the cut-curve ensemble")
    q.add_argument("--geometry", choices=["disc", "halfplane"], required=True)
    q.add_argument("--R", type=float, default=0.2)
    q.add_argument("--n", type=int, default=30_000)
    q.add_argument("--samples", type=int, default=100_000)
    q.add_argument("--stride", type=int, default=200)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(fn=_cmd_cutcurve)

    q = sub.add_parser("theory", help="write theoretical density/CDF tables")
    q.add_argument("--geometry", choices=["disc", "halfplane"], required=True)
    q.add_argument("--correction", help="correction.csv to fold in")
    q.add_argument("--theta-step", type=float, default=1.0)
    q.add_argument("--out", required=True)
    q.set_defaults(fn=_cmd_theory)

    q = sub.add_parser("lerw-check", help="lambda-SAW vs harmonic measure report")
    q.add_argument("--width", type=int, default=4)
    q.add_argument("--height", type=int, default=4)
    q.add_argument("--c", type=float, default=-2.0)
    q.add_argument("--beta", type=float, default=0.25)
    q.add_argument("--out", required=True)
    q.set_defaults(fn=_cmd_lerw_check)

    q = sub.add_parser("experiment", help="full pipeline from a config file")
    q.add_argument("--config", required=True)
    q.add_argument("--out-dir", required=True)
    q.set_defaults(fn=_cmd_experiment)

    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize others
        return int(exc.code or 0)
    try:
        _check_threads(args)
        return args.fn(args)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
