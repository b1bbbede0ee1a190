"""Command-line front end.

    noisybandit-plot plot --preset fig1_arms --in out --out figures [--format png|svg] [--log-y]

Reads <in>/<preset>/results.csv and writes one image per panel. Exit codes:
0 success, 1 configuration problems, 2 runtime failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_PRESETS, UnknownFigure, figure_spec, render
from .reader import MissingSweepPoint, SchemaMismatch


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SchemaMismatch(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="noisybandit-plot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    plot_p = sub.add_parser("plot", help="render the panels of one preset's results")
    plot_p.add_argument("--preset", required=True, choices=FIGURE_PRESETS)
    plot_p.add_argument("--in", dest="in_dir", type=Path, default=Path("out"), help="directory holding <preset>/results.csv")
    plot_p.add_argument("--out", type=Path, default=Path("figures"))
    plot_p.add_argument("--format", choices=("png", "svg"), default="png")
    plot_p.add_argument("--log-y", action="store_true")
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        csv_path = args.in_dir / args.preset / "results.csv"
        if not csv_path.exists():
            print(f"error: {csv_path} not found", file=sys.stderr)
            return 1
        paths = render(figure_spec(args.preset), csv_path, args.out, fmt=args.format, log_y=args.log_y)
        for path in paths:
            print(path)
        return 0
    except (SchemaMismatch, MissingSweepPoint, UnknownFigure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
