"""``qnehari <experiment> --config <path> [--symbol ...] [--seed ...] [--out <dir>]``."""
from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, LabConfig
from .experiments import run_experiment

EXPERIMENTS = ("theorem1", "theoremA", "rkt", "selftest")
EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2

log = logging.getLogger("qnehari")


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors; exit code 2 is reserved for partial reports
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qnehari", description="Norm-equivalence experiments for quaternionic Hankel operators.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, help="JSON file with LabConfig keys")
    p.add_argument("--symbol", help="symbol spec, e.g. random_poly:deg=32 or suite")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = LabConfig.load(args.config).override(symbol=args.symbol, seed=args.seed, out=args.out)
        log.info("running %s on %s (seed %d)", args.experiment, cfg.symbol, cfg.seed)
        # symbol construction errors surface here; numerical failures are recorded per row
        report = run_experiment(args.experiment, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report.write(cfg.out)
    if cfg.figures and not args.no_figures:
        from .plotting import render

        render(report, cfg.out)
    for row in report.rows:
        if row.status != "ok":
            log.warning("%s: %s %s", row.quantity, row.status, row.message)
    print(report.csv_text(), end="")
    return EXIT_PARTIAL if report.partial else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
