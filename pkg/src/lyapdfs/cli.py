"""Command-line front end: ``lyapdfs {run,sweep,check-dfs,presets}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import ConfigError, RunConfig, apply_overrides, describe_presets, format_config, load_config, preset_config
from .lindblad import dfs_check
from .propagator import NumericalInvariantError
from .runner import run, summary_text, sweep
from .scenario import FIGURES, build_model, dark_states

EXIT_OK = 0
EXIT_DFS_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

log = logging.getLogger("lyapdfs")


def _resolve(args) -> RunConfig:
    cfg = preset_config(args.preset) if args.preset else RunConfig()
    if args.config:
        cfg = load_config(args.config, base=cfg)
    overrides = []
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        overrides.append((key.strip(), value.strip()))
    if getattr(args, "out", None):
        overrides.append(("output.path", args.out))
    if getattr(args, "trajectories", False):
        overrides.append(("output.trajectories", "true"))
    return apply_overrides(cfg, overrides)


def _add_common(p: argparse.ArgumentParser, outputs: bool = True) -> None:
    p.add_argument("--preset", choices=FIGURES, help="start from a figure preset")
    p.add_argument("--config", metavar="PATH", help="key-value config file applied on top of the preset")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key (repeatable)")
    p.add_argument("--print-config", action="store_true", help="print the resolved config and exit")
    if outputs:
        p.add_argument("--out", metavar="DIR", help="output directory (overrides output.path)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lyapdfs", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate one trajectory")
    _add_common(p)

    p = sub.add_parser("sweep", help="integrate every point of the sweep section")
    _add_common(p)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--trajectories", action="store_true", help="also write per-point trajectory CSVs")

    p = sub.add_parser("check-dfs", help="test the dark states against the three DFS conditions")
    _add_common(p, outputs=False)
    p.add_argument("--tol", type=float, default=1e-9)

    sub.add_parser("presets", help="list figure presets")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    if args.command == "presets":
        print("\n".join(describe_presets()))
        return EXIT_OK

    try:
        cfg = _resolve(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.print_config:
        sys.stdout.write(format_config(cfg))
        return EXIT_OK

    try:
        if args.command == "check-dfs":
            report = dfs_check(dark_states(cfg.scenario.phi), build_model(cfg.scenario), tol=args.tol)
            print("\n".join(report.lines()))
            return EXIT_OK if report.passed else EXIT_DFS_FAILED
        if args.command == "run":
            summary = run(cfg)
            sys.stdout.write(summary_text(summary, cfg.output.precision))
        else:
            if cfg.sweep is None:
                print("config error: no sweep section (set sweep.axis, sweep.start, sweep.stop, sweep.count)", file=sys.stderr)
                return EXIT_CONFIG
            points = sweep(cfg, jobs=args.jobs)
            print(f"points={len(points)}")
            print(f"output={os.path.join(cfg.output.path, 'sweep.csv')}")
    except NumericalInvariantError as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # model/config combinations rejected at construction, e.g. [A, H0] != 0
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
