"""Command-line entry point: ``vintage-pmp SCENARIO [options]``."""

from __future__ import annotations

import argparse
import logging
import sys

from .diagnostics import run_scenario


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="vintage-pmp",
        description="Solve a vintage-capital investment scenario by forward-backward sweep.",
        epilog="exit status: 0 ok, 2 invalid scenario, 3 model assumptions violated, 4 no convergence",
    )
    ap.add_argument("scenario", help="path to a JSON scenario file")
    ap.add_argument("--out-dir", default="results", help="directory for CSV and JSON outputs (default: results)")
    ap.add_argument("--with-oracle", action="store_true", default=None,
                    help="also run the direct optimiser and report the cost gap")
    ap.add_argument("--with-gradient-check", action="store_true", default=None,
                    help="compare value differences with the initial costate")
    ap.add_argument("--tol", type=float, help="sweep tolerance on the maximum-principle residual")
    ap.add_argument("--max-iter", type=int, help="maximum sweep iterations")
    ap.add_argument("-q", "--quiet", action="store_true", help="only report errors")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO, format="%(levelname)s: %(message)s")
    overrides = {
        "tol": args.tol,
        "max_iter": args.max_iter,
        "with_oracle": args.with_oracle,
        "with_gradient_check": args.with_gradient_check,
    }
    return run_scenario(args.scenario, args.out_dir, overrides)


if __name__ == "__main__":
    sys.exit(main())
