"""Command line entry point: ``edgebits {sweep,profile,crosscheck,fixed-point}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..choi import FixedPointLabels
from .config import ConfigError, load_config
from .runs import fixed_point_report, run_crosscheck, run_profile
from .sweep import _cell, run_sweep


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="run configuration (key = value lines)")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--workers", type=int, default=None, help="process pool size (overrides config)")
    p.add_argument("--plot", action="store_true", help="also write SVG figures")
    p.add_argument("--allow-large-oracle", action="store_true", help="let the dense oracle go up to L=11")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _labels(sector: str, mixture: str | None) -> FixedPointLabels:
    if mixture:
        weights = {}
        for item in mixture.split(","):
            key, _, w = item.partition(":")
            weights[(int(key[0]), int(key[1]))] = float(w)
        return FixedPointLabels(weights=weights)
    a, b = (int(x) for x in sector.split(","))
    return FixedPointLabels(a, b)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgebits", description="Decohered cluster-chain edge diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    sub.add_parser("sweep", parents=[common], help="grid sweep to CSV (and SVG)")
    sub.add_parser("profile", parents=[common], help="Z profile with and without the W flip")
    sub.add_parser("crosscheck", parents=[common], help="compare the MPS pipeline with the dense oracle")
    fp = sub.add_parser("fixed-point", parents=[common], help="diagnostics of the fixed-point state")
    fp.add_argument("--L", type=int, default=9)
    fp.add_argument("--sector", default="0,0", help="alpha,beta edge labels")
    fp.add_argument("--mixture", help="weighted sectors, e.g. 00:0.5,11:0.5")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    if args.command == "fixed-point":
        report = fixed_point_report(args.L, _labels(args.sector, args.mixture))
        text = "".join(f"{k}={_cell(v)}\n" for k, v in report.items())
        sys.stdout.write(text)
        if args.config is None and args.out != Path("."):
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"fixed_point_L{args.L}.txt").write_text(text)
        return 0

    if args.config is None:
        print(f"{args.command} needs --config", file=sys.stderr)
        return 2
    try:
        config = load_config(args.config).with_workers(args.workers)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "sweep":
        print(run_sweep(config, args.out, plot=args.plot))
        return 0
    if args.command == "profile":
        print(run_profile(config, args.out, plot=args.plot))
        return 0
    report = run_crosscheck(config, allow_large=args.allow_large_oracle)
    print(report.table())
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "crosscheck.txt").write_text(report.table() + "\n")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
