"""Command-line front end.

Subcommands:
  find-orbit   solve the periodic orbit at one mass, print the orbit dump
  stability    classify one mass, print the stability record
  sweep        run the mass-grid sweep and write CSV/plot data/SVG files
  verify       run the full invariant suite at one mass
  plot         re-render the SVG plots from an existing sweep CSV

Exit status: 0 success, 1 computation failure, 2 usage error.
"""

import argparse
import json
import os
import sys
from dataclasses import asdict

from . import __version__
from .dynamics import MassParams
from .errors import BrouckeError
from .sweep import (SweepConfig, degeneracy_census, emit_outputs, mass_grid,
                    read_records_csv, run_sweep)

ENV_OUT_DIR = "BROUCKE_OUT_DIR"


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="broucke",
        description="Isosceles three-body periodic orbit and its stability.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("find-orbit", help="solve the orbit at one mass")
    p.add_argument("--m1", type=float, required=True)
    p.add_argument("--e", type=float, default=-1.0, help="energy level")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--guess", type=float, default=None,
                   help="warm-start value for Q4(0)")

    p = sub.add_parser("stability", help="classify stability at one mass")
    p.add_argument("--m1", type=float, required=True)
    p.add_argument("--e", type=float, default=-1.0)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--delta", type=float, default=1e-3,
                   help="degeneracy tolerance")

    p = sub.add_parser("sweep", help="run the mass-grid sweep")
    p.add_argument("--min", type=float, default=0.005, dest="m1_min")
    p.add_argument("--max", type=float, default=1.465, dest="m1_max")
    p.add_argument("--step", type=float, default=0.005)
    p.add_argument("--e", type=float, default=-1.0)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--out", default=None,
                   help=f"output directory (default ${ENV_OUT_DIR} "
                        f"or ./broucke_out)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--resume", action="store_true",
                   help="recompute only missing/failed grid points")
    p.add_argument("--no-svg", action="store_true")
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("verify", help="run the invariant suite at one mass")
    p.add_argument("--m1", type=float, required=True)
    p.add_argument("--e", type=float, default=-1.0)
    p.add_argument("--tol", type=float, default=1e-12)

    p = sub.add_parser("plot", help="re-render SVGs from a sweep CSV")
    p.add_argument("--in", dest="csv_in", required=True)
    p.add_argument("--out", default=None)
    return parser


def _cmd_find_orbit(args):
    from .orbit import find_orbit
    orb = find_orbit(MassParams(m1=args.m1, E=args.e), guess=args.guess,
                     tol=args.tol)
    print(json.dumps(orb.as_dict(), indent=2))
    return 0


def _cmd_stability(args):
    from .sweep import analyze_mass
    record = analyze_mass(args.m1, E=args.e, tol=args.tol, delta=args.delta)
    print(json.dumps(asdict(record), indent=2))
    return 0 if record.status in ("ok", "unreliable") else 1


def _cmd_sweep(args):
    cfg = SweepConfig(m1_min=args.m1_min, m1_max=args.m1_max, step=args.step,
                      E=args.e, tol=args.tol, delta=args.delta,
                      out_dir=args.out, workers=args.workers,
                      resume=args.resume, svg=not args.no_svg)
    log = None if args.quiet else (lambda msg: print(msg, flush=True))
    if log:
        log(f"sweep over {len(mass_grid(cfg))} masses "
            f"[{cfg.m1_min}, {cfg.m1_max}] step {cfg.step} -> {cfg.out_dir}")
    records = run_sweep(cfg, log=log)
    written = emit_outputs(records, cfg)
    n_fail = sum(1 for r in records if r.status.startswith("failed"))
    if log:
        for path in written:
            log(f"wrote {path}")
        log(f"{len(records)} records, {n_fail} failed")
        for kinds, lo, hi in degeneracy_census(records):
            log(f"degeneracy ({kinds}) in m1 range [{lo:g}, {hi:g}]")
    return 0


def _cmd_verify(args):
    from .verify import run_verification
    checks, record = run_verification(args.m1, E=args.e, tol=args.tol)
    for check in checks:
        print(check.line())
    bad = [c for c in checks if not c.ok]
    print(f"{len(checks) - len(bad)}/{len(checks)} checks passed "
          f"(m1={args.m1}, e={record.e:.9g}, eig2={record.eig2:.9g})")
    return 1 if bad else 0


def _cmd_plot(args):
    records = read_records_csv(args.csv_in)
    out = args.out or os.environ.get(ENV_OUT_DIR, "broucke_out")
    cfg = SweepConfig(out_dir=out, svg=True)
    for path in emit_outputs(records, cfg):
        print(f"wrote {path}")
    return 0


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "find-orbit": _cmd_find_orbit,
        "stability": _cmd_stability,
        "sweep": _cmd_sweep,
        "verify": _cmd_verify,
        "plot": _cmd_plot,
    }
    try:
        return handlers[args.command](args)
    except BrouckeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
