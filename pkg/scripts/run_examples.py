"""Run every example config in configs/ through the CLI and print exit codes.

usage: python3 scripts/run_examples.py [--out DIR]
"""
import argparse
import json
from pathlib import Path

from monozero.harness.cli import SUBCOMMANDS, main as cli_main

ROOT = Path(__file__).resolve().parents[1]
BY_KIND = {kind: sub for sub, kind in SUBCOMMANDS.items()}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=ROOT / "out")
    args = ap.parse_args()
    results = []
    for cfg in sorted((ROOT / "configs").glob("*.json")):
        kind = json.loads(cfg.read_text())["kind"]
        print(f"\n=== {cfg.name}")
        code = cli_main([BY_KIND[kind], "--config", str(cfg), "--out", str(args.out / cfg.stem)])
        results.append((cfg.name, code))
    print("\nexit codes:")
    for name, code in results:
        print(f"  {name:<28} {code}")


if __name__ == "__main__":
    main()
