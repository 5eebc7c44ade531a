"""Command-line interface: simulate, stats, bench, validate."""
from __future__ import annotations

import argparse
import sys

from .errors import ConfigurationError, DelayOverflowError, HorizonExceededError
from .harness import cli_bench, cli_simulate, cli_stats, cli_validate, \
    resolve_workers


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ambit-channel",
        description="Vehicle-to-infrastructure channel simulation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the configured engines")
    sim.add_argument("--config", required=True, help="experiment config JSON")
    sim.add_argument("--seed", type=int, default=None,
                     help="override run.base_seed")
    sim.add_argument("--workers", type=int, default=None,
                     help="realization-level worker processes")
    sim.add_argument("--out", default=None, help="override output directory")
    sim.add_argument("--format", choices=("csv", "binary"), action="append",
                     default=None, help="override output formats (repeatable)")

    st = sub.add_parser("stats", help="ACF / Doppler PSD over a stored run")
    st.add_argument("--manifest", required=True, help="manifest.json of the run")
    st.add_argument("--config", default=None,
                    help="stats options JSON (anchors_s, max_lag_s, window_s)")
    st.add_argument("--out", default=None, help="override output directory")

    be = sub.add_parser("bench", help="engine runtime / power-error comparison")
    be.add_argument("--config", required=True, help="experiment config JSON")
    be.add_argument("--out", default=None, help="override output directory")
    be.add_argument("--sweep", type=float, action="append", default=None,
                    help="mean path count / arrival rate point (repeatable)")

    va = sub.add_parser("validate", help="check a config without running")
    va.add_argument("--config", required=True, help="experiment config JSON")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            fmts = tuple(args.format) if args.format else None
            return cli_simulate(args.config, out_dir=args.out,
                                workers=resolve_workers(args.workers),
                                seed=args.seed, formats=fmts)
        if args.command == "stats":
            return cli_stats(args.manifest, args.config, out_dir=args.out)
        if args.command == "bench":
            return cli_bench(args.config, out_dir=args.out, sweep=args.sweep)
        if args.command == "validate":
            return cli_validate(args.config)
    except (ConfigurationError, DelayOverflowError, HorizonExceededError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
