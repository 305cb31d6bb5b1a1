"""Command-line entry point: ``eecpsim --config cfg.json --out results``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .experiment import ConfigError, parse_config, run_experiment, spec_from_dict, spec_to_dict


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eecpsim", description="Run seeded EECP / heterogeneous LEACH comparisons.")
    parser.add_argument("--config", type=Path, help="JSON config file (omitted keys take defaults)")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--trials", type=int, help="trials per protocol")
    parser.add_argument("--seed", type=int, help="base seed; trial i uses seed + i")
    parser.add_argument(
        "--protocol", action="append", choices=["leach_het", "eecp"], help="protocol to run (repeatable)"
    )
    parser.add_argument("--rounds", type=int, help="maximum rounds per trial")
    parser.add_argument("--charts", action=argparse.BooleanOptionalAction, default=None, help="write SVG charts")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        spec = parse_config(text)
        overrides = spec_to_dict(spec)
        for key, value in (
            ("output_dir", args.out and str(args.out)),
            ("trials", args.trials),
            ("base_seed", args.seed),
            ("protocols", args.protocol),
            ("max_rounds", args.rounds),
            ("emit_charts", args.charts),
        ):
            if value is not None:
                overrides[key] = value
        spec = spec_from_dict(overrides)
        result = run_experiment(spec, jobs=args.jobs)
    except (ConfigError, OSError, RuntimeError) as exc:
        print(f"eecpsim: error: {exc}", file=sys.stderr)
        return 2
    cmp = result.summary.get("comparison_eecp_vs_leach_het")
    print(f"wrote {len(result.files)} files to {spec.output_dir}")
    for p, info in result.summary["protocols"].items():
        ms = info["milestones"]
        print(
            f"{p:>10}: first={ms['first']['restricted_mean']:.1f} half={ms['half']['restricted_mean']:.1f} "
            f"last={ms['last']['restricted_mean']:.1f} (censored {ms['last']['censored']}) "
            f"packets={info['packets_total']['mean']:.1f}"
        )
    if cmp:
        print(json.dumps({k: v["mean_diff"] for k, v in cmp.items()}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
