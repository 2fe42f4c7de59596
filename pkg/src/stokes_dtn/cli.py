"""Command line: ``stokes-dtn <experiment> --config <path> [options]``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for
configuration or output-path errors.
"""

from __future__ import annotations

import argparse
import sys

from .config import EXPERIMENTS, ConfigError, load_config


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stokes-dtn", description="Half-plane Stokes DtN verification suites.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="JSON config file (defaults are used when omitted)")
    p.add_argument("--out", default="stokes-dtn-out", help="output directory (default: %(default)s)")
    p.add_argument("--plots", action="store_true", help="also write SVG line plots")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--workers", type=int, help="override the config worker count")
    p.add_argument("--paper-literal-symbol", action="store_true",
                   help="add side-by-side columns for the uncorrected printed symbol")
    p.add_argument("--quiet", action="store_true", help="do not print check lines")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.experiment)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.workers is not None:
            overrides["workers"] = args.workers
        if args.paper_literal_symbol:
            overrides["paper_literal_symbol"] = True
        if overrides:
            from .config import validate_config

            cfg = validate_config({**cfg.to_dict(), **overrides})
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2

    from .experiments import run_experiment

    try:
        report = run_experiment(cfg, args.out, args.plots)
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        for line in report.format_lines():
            print(line)
        print(f"{cfg.experiment}: {'PASS' if report.passed else 'FAIL'} "
              f"({sum(c.passed for c in report.checks)}/{len(report.checks)} checks, "
              f"{report.wall_time:.1f} s) -> {args.out}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
