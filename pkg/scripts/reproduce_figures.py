"""Paired EECP vs heterogeneous-LEACH comparison plus the two EECP ablations.

Writes the main experiment to <out>/ (CSV, summary.json, fig4-6.svg) and the
ablation comparisons to <out>/ablations.json.

    python scripts/reproduce_figures.py --out results/reproduction --trials 30
"""

import argparse
import json
from pathlib import Path

from eecpsim.experiment import ExperimentSpec, compare, run_experiment, run_trials
from eecpsim.model import NetworkConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("results/reproduction"))
    parser.add_argument("--trials", type=int, default=30)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--rounds", type=int, default=60_000)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    spec = ExperimentSpec(base=NetworkConfig(max_rounds=args.rounds), trials=args.trials,
                          base_seed=args.seed, output_dir=args.out)
    result = run_experiment(spec, jobs=args.jobs)
    seeds = [spec.seed(i) for i in range(spec.trials)]
    eecp_cfg = spec.config_for("eecp")
    eecp, leach = result.trials["eecp"], result.trials["leach_het"]
    clamped = run_trials(eecp_cfg.replace(threshold_variant="clamped_scaling"), seeds, jobs=args.jobs)
    no_relay = run_trials(eecp_cfg.replace(relays=False), seeds, jobs=args.jobs)
    report = {
        "eecp_literal_vs_leach_het": compare(eecp, leach),
        "eecp_clamped_vs_leach_het": compare(clamped, leach),
        "eecp_relays_vs_no_relays": compare(eecp, no_relay),
    }
    (args.out / "ablations.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    for name, cmp in report.items():
        print(name)
        for metric, v in cmp.items():
            print(f"  {metric:>13}: {v['mean_a']:10.1f} vs {v['mean_b']:10.1f}  diff {v['mean_diff']:+.1f}")


if __name__ == "__main__":
    main()
