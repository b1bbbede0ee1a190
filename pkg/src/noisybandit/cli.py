"""Command-line front end.

    noisybandit run --preset fig1_arms [--scale desk|paper] [--seed N]
                    [--out DIR] [--config FILE] [--workers N|auto]
    noisybandit list-presets
    noisybandit describe --preset fig3_snr [--scale desk|paper]

Exit codes: 0 on success, 1 for configuration problems, 2 for runtime
failures (unwritable output, simulation errors).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .experiments import (
    DEFAULT_MASTER_SEED,
    PRESET_NAMES,
    PRESET_SUMMARIES,
    ParseError,
    UnknownPreset,
    ValidationError,
    describe,
    parse_config,
    preset,
    run_experiment,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract reserves 2 for runtime
    # failures, so route usage problems through the validation path instead.
    def error(self, message):
        raise ValidationError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="noisybandit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment and write results.csv + manifest.txt")
    run_p.add_argument("--preset", choices=PRESET_NAMES, help="built-in experiment to run")
    run_p.add_argument("--config", type=Path, help="config file (see README for the grammar)")
    run_p.add_argument("--scale", choices=("desk", "paper"), help="desk: T=2000 x 20 scenarios; paper: T=5000 x 50")
    run_p.add_argument("--seed", type=int, help="master seed (default fixed build seed)")
    run_p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default ./out)")
    run_p.add_argument("--workers", default="1", help="process count or 'auto' (results identical either way)")

    sub.add_parser("list-presets", help="list built-in presets")

    desc_p = sub.add_parser("describe", help="print a preset's grid and defaults")
    desc_p.add_argument("--preset", required=True, choices=PRESET_NAMES)
    desc_p.add_argument("--scale", choices=("desk", "paper"), default="desk")

    return parser


def _resolve_workers(raw: str) -> int:
    if raw == "auto":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"--workers must be an integer or 'auto', got {raw!r}")
    if value < 1:
        raise ValidationError("--workers must be at least 1")
    return value


def _cmd_run(args) -> int:
    workers = _resolve_workers(args.workers)
    if args.config is not None:
        resolved = parse_config(args.config, base_preset=args.preset, scale=args.scale, seed=args.seed)
    elif args.preset is not None:
        seed = args.seed if args.seed is not None else DEFAULT_MASTER_SEED
        resolved = preset(args.preset, scale=args.scale or "desk", seed=seed)
    else:
        raise ValidationError("pass --preset and/or --config")
    summary = run_experiment(resolved, args.out, workers=workers)
    print(f"{summary.name}: wrote {summary.rows} rows to {summary.csv_path}")
    print(f"manifest: {summary.manifest_path}")
    return 0


def _cmd_list(_args) -> int:
    for name in PRESET_NAMES:
        print(f"{name:18s} {PRESET_SUMMARIES[name]}")
    return 0


def _cmd_describe(args) -> int:
    print(describe(preset(args.preset, scale=args.scale)))
    return 0


def main(argv=None) -> int:
    handlers = {"run": _cmd_run, "list-presets": _cmd_list, "describe": _cmd_describe}
    try:
        args = _build_parser().parse_args(argv)
        return handlers[args.command](args)
    except (ParseError, ValidationError, UnknownPreset) as exc:
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
