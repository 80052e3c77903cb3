#!/usr/bin/env python3
"""Regenerate every figure CSV at desk or full scale.

    python scripts/run_figures.py --desk --out results/desk
    python scripts/run_figures.py --full --out results/full --trials 500
"""

import argparse
import sys
import time

from dnlfm_isac.cli import main as cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    scale = parser.add_mutually_exclusive_group()
    scale.add_argument("--desk", dest="preset", action="store_const", const="--desk")
    scale.add_argument("--full", dest="preset", action="store_const", const="--full")
    parser.add_argument("--out", default="results")
    parser.add_argument("--config")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--skip-fig1", action="store_true", help="skip the Monte-Carlo detection run")
    args = parser.parse_args()

    common = ["--out", args.out, args.preset or "--desk"]
    if args.config:
        common += ["--config", args.config]
    if args.seed is not None:
        common += ["--seed", str(args.seed)]
    commands = [["gen-waveform"], ["mismatch-loss"], ["fig2"], ["fig3"], ["fig4"]]
    if not args.skip_fig1:
        fig1 = ["fig1"] + (["--trials", str(args.trials)] if args.trials else [])
        commands.append(fig1)
    for cmd in commands:
        start = time.perf_counter()
        print(f"== {cmd[0]}", flush=True)
        code = cli(cmd + common)
        print(f"   done in {time.perf_counter() - start:.1f} s", flush=True)
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
