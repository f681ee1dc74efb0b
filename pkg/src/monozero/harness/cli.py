"""Command-line entry point: ``monozero <subcommand> --config PATH [flags]``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, parse_config, parse_dict, with_overrides
from .runner import EXIT_CONFIG, run

SUBCOMMANDS = {
    "solve": "zero",
    "minimize": "minimize",
    "vi": "vi",
    "gp": "gradient_projection",
    "respath": "resolvent_path",
    "compare": "compare",
    "check": "audit",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monozero", description="Regularized duality-map solvers for monotone problems.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, kind in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=f"run a '{kind}' problem")
        p.add_argument("--config", type=Path, required=name != "check", help="JSON problem config")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--seed", type=int, help="RNG seed (overrides config)")
        p.add_argument("--format", choices=("csv", "json"), help="trace format (overrides config)")
        p.add_argument("--max-iter", type=int, help="iteration cap (overrides config)")
        p.add_argument("--tol", type=float, help="residual tolerance (overrides config)")
    return parser


def load(args) -> object:
    kind = SUBCOMMANDS[args.command]
    if args.config is None:
        cfg = parse_dict({"kind": kind})
    else:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError([f"cannot read {args.config}: {exc.strerror}"]) from None
        cfg = parse_config(text, kind)
    if args.seed is not None and args.seed < 0:
        raise ConfigError(["--seed must be a non-negative integer"])
    return with_overrides(cfg, seed=args.seed, fmt=args.format, max_iter=args.max_iter, tol=args.tol)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load(args)
    except ConfigError as exc:
        print("invalid config:", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())
