#!/usr/bin/env python3
"""Run the four standard experiments and (optionally) render their figures.

Example:
    python scripts/reproduce_figures.py --scale desk --out out --workers auto
    python scripts/reproduce_figures.py --figures fig1_arms fig4_dimension

Rendering needs the companion plotting package (see plots/ in this repo);
when it is not installed the script prints the command to run instead.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from noisybandit.cli import main as cli_main

FIGURES = ("fig1_arms", "fig2_estimability", "fig3_snr", "fig4_dimension")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--figures", nargs="+", default=list(FIGURES), choices=FIGURES)
    parser.add_argument("--scale", choices=("desk", "paper"), default="desk")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default="out")
    parser.add_argument("--workers", default="auto")
    parser.add_argument("--render", action="store_true", help="also render figures via noisybandit-plot")
    args = parser.parse_args()

    for name in args.figures:
        argv = ["run", "--preset", name, "--scale", args.scale, "--out", args.out, "--workers", args.workers]
        if args.seed is not None:
            argv += ["--seed", str(args.seed)]
        start = time.perf_counter()
        code = cli_main(argv)
        if code != 0:
            return code
        print(f"{name}: {time.perf_counter() - start:.1f}s")

    if args.render:
        try:
            from noisybandit_plots.cli import main as plot_main
        except ImportError:
            print("plot package not installed; run: pip install -e plots/")
            print(f"then: noisybandit-plot plot --preset <name> --in {args.out} --out figures")
            return 0
        for name in args.figures:
            code = plot_main(["plot", "--preset", name, "--in", args.out, "--out", "figures"])
            if code != 0:
                return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
