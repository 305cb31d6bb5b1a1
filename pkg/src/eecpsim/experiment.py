"""Seeded multi-trial protocol comparisons and their on-disk outputs."""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from . import charts
from .engine import run_simulation
from .metrics import SERIES_FIELDS, AggregateSeries, RoundSeries, TrialResult, aggregate_trials
from .model import DAvgMode, NetworkConfig, Point, Protocol, ThresholdVariant
from .radio import RadioParams

log = logging.getLogger(__name__)

CSV_HEADER = ("round",) + SERIES_FIELDS

NETWORK_KEYS = {
    "n_nodes", "field_side", "gateway_fraction", "energy_factor", "initial_energy", "bs_position",
    "p_opt", "d_avg_mode", "threshold_variant", "relays", "max_rounds", "radio",
}
EXPERIMENT_KEYS = {"protocols", "trials", "base_seed", "output_dir", "emit_charts"}
RADIO_KEYS = {f.name for f in dataclasses.fields(RadioParams)}

METRIC_TITLES = {
    "alive": "No. of Alive Nodes",
    "packets_cum": "No. of Packets Sent to Base Station",
    "packets": "Packets Sent to Base Station per Round",
    "ch_count": "No. of Cluster Heads per Round",
    "residual_j": "Residual Energy (J)",
    "milestones": "Round for First, Half, Last Dead Node",
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    base: NetworkConfig = field(default_factory=NetworkConfig)
    protocols: list = field(default_factory=lambda: [Protocol.LEACH_HET, Protocol.EECP])
    trials: int = 30
    base_seed: int = 1
    output_dir: Path = Path("results")
    emit_charts: bool = True

    def __post_init__(self):
        self.protocols = [Protocol(p) for p in self.protocols]
        self.output_dir = Path(self.output_dir)
        if not self.protocols:
            raise ConfigError("protocols must list at least one protocol")
        if len(set(self.protocols)) != len(self.protocols):
            raise ConfigError("protocols must not repeat")
        if isinstance(self.trials, bool) or int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials must be an integer >= 1, got {self.trials!r}")

    def seed(self, trial: int) -> int:
        # both protocols see the same deployment for a given trial index
        return self.base_seed + trial

    def config_for(self, protocol) -> NetworkConfig:
        return self.base.replace(protocol=Protocol(protocol))


def config_to_dict(config: NetworkConfig) -> dict:
    out = {}
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        if f.name == "radio":
            value = dataclasses.asdict(value)
        elif isinstance(value, Point):
            value = [value.x, value.y]
        elif hasattr(value, "value"):
            value = value.value
        out[f.name] = value
    return out


def spec_to_dict(spec: ExperimentSpec) -> dict:
    d = config_to_dict(spec.base)
    d.pop("protocol")
    d.update(
        protocols=[p.value for p in spec.protocols],
        trials=spec.trials,
        base_seed=spec.base_seed,
        output_dir=str(spec.output_dir),
        emit_charts=spec.emit_charts,
    )
    return d


def _choice(enum_cls, value, key):
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        raise ConfigError(f"{key} must be one of {{{allowed}}}, got {value!r}") from None


def spec_from_dict(data: Mapping) -> ExperimentSpec:
    if not isinstance(data, Mapping):
        raise ConfigError("config must be a JSON object")
    for key in data:
        if key not in NETWORK_KEYS | EXPERIMENT_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
    radio_data = data.get("radio") or {}
    if not isinstance(radio_data, Mapping):
        raise ConfigError("radio must be a JSON object")
    for key in radio_data:
        if key not in RADIO_KEYS:
            raise ConfigError(f"unknown config key 'radio.{key}'")
    net = {k: v for k, v in data.items() if k in NETWORK_KEYS and k != "radio"}
    if "d_avg_mode" in net:
        net["d_avg_mode"] = _choice(DAvgMode, net["d_avg_mode"], "d_avg_mode")
    if "threshold_variant" in net:
        net["threshold_variant"] = _choice(ThresholdVariant, net["threshold_variant"], "threshold_variant")
    if "bs_position" in net and net["bs_position"] is not None:
        bs = net["bs_position"]
        if not isinstance(bs, Sequence) or len(bs) != 2:
            raise ConfigError(f"bs_position must be [x, y], got {bs!r}")
    exp = {k: v for k, v in data.items() if k in EXPERIMENT_KEYS}
    if "protocols" in exp:
        exp["protocols"] = [_choice(Protocol, p, "protocols") for p in exp["protocols"]]
    try:
        radio = RadioParams(**radio_data)
        base = NetworkConfig(radio=radio, **net)
        return ExperimentSpec(base=base, **exp)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(text: str) -> ExperimentSpec:
    """Experiment spec from JSON text; omitted fields take the reference defaults."""
    if not text.strip():
        return spec_from_dict({})
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return spec_from_dict(data)


def _run_trial(args) -> TrialResult:
    config, seed = args
    return TrialResult.from_trace(run_simulation(config, seed))


def run_trials(config: NetworkConfig, seeds: Sequence[int], jobs: int = 1) -> list[TrialResult]:
    """Run one trial per seed; results come back in seed order regardless of ``jobs``."""
    work = [(config, s) for s in seeds]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_trial, work))
    return [_run_trial(w) for w in work]


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return str(int(v)) if v.is_integer() and abs(v) < 2**53 else repr(v)


def emit_csv(series: RoundSeries, path) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            cols = [series.round] + [getattr(series, f) for f in SERIES_FIELDS]
            for row in zip(*cols):
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv(path) -> RoundSeries:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"{path}: unexpected header {rows[0]}")
    body = rows[1:]
    cols = list(zip(*body)) if body else [()] * len(CSV_HEADER)
    out = {}
    for name, col in zip(CSV_HEADER, cols):
        if name == "residual_j":
            out[name] = np.array([float(v) for v in col], dtype=float)
        else:
            vals = [float(v) for v in col]
            ints = all(v.is_integer() for v in vals)
            out[name] = np.array(vals, dtype=int if ints else float)
    return RoundSeries(**out)


def emit_chart(series: Mapping, metric: str, path, max_rounds: Optional[int] = None) -> Path:
    """Chart of one metric across protocols.

    ``series`` maps a label to a RoundSeries or AggregateSeries (its mean is
    plotted). ``metric == "milestones"`` draws the grouped bar chart and needs
    AggregateSeries values.
    """
    if not series:
        raise ValueError("need at least one series")
    title = METRIC_TITLES.get(metric, metric)
    if metric == "milestones":
        values = {}
        for label, agg in series.items():
            values[label] = {
                name: (st.restricted_mean if st.censored < agg.n_trials else None, st.censored > 0)
                for name, st in agg.milestones.items()
            }
        if max_rounds is None:
            raise ValueError("milestone chart needs max_rounds")
        return charts.milestone_chart(values, title, path, max_rounds)
    lines = {}
    for label, s in series.items():
        s = s.mean if isinstance(s, AggregateSeries) else s
        lines[label] = (s.round, getattr(s, metric))
    return charts.line_chart(lines, title, path, y_label=title)


def _paired_effect(a: Sequence[float], b: Sequence[float]) -> dict:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    diff = a - b
    sd = float(np.std(diff, ddof=1)) if len(diff) > 1 else 0.0
    return {
        "mean_a": float(a.mean()),
        "mean_b": float(b.mean()),
        "mean_diff": float(diff.mean()),
        "relative_diff": float(diff.mean() / b.mean()) if b.mean() else None,
        "paired_cohens_d": float(diff.mean() / sd) if sd > 0 else None,
        "a_greater": bool(a.mean() > b.mean()),
    }


def trial_metrics(results: Sequence[TrialResult]) -> dict:
    """Per-trial scalar metrics; censored milestones count as max_rounds."""
    out = {"first": [], "half": [], "last": [], "packets_total": []}
    for r in results:
        cap = r.config.max_rounds
        for name, v in r.milestones.as_dict().items():
            out[name].append(cap if v is None else v)
        out["packets_total"].append(int(r.series.packets_cum[-1]) if len(r.series) else 0)
    return out


def compare(results_a: Sequence[TrialResult], results_b: Sequence[TrialResult]) -> dict:
    """Paired comparison a vs b on every milestone and on total packets delivered."""
    ma, mb = trial_metrics(results_a), trial_metrics(results_b)
    return {name: _paired_effect(ma[name], mb[name]) for name in ma}


def _milestone_summary(agg: AggregateSeries) -> dict:
    return {
        name: {
            "mean_uncensored": st.mean,
            "std_uncensored": st.std,
            "censored": st.censored,
            "restricted_mean": st.restricted_mean,
            "values": st.values,
        }
        for name, st in agg.milestones.items()
    }


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    trials: dict        # protocol value -> list[TrialResult]
    aggregates: dict    # protocol value -> AggregateSeries
    summary: dict
    files: list


def summarize(spec: ExperimentSpec, trials: Mapping, aggregates: Mapping) -> dict:
    protocols = {}
    for p, results in trials.items():
        packets = trial_metrics(results)["packets_total"]
        protocols[p] = {
            "trials": len(results),
            "milestones": _milestone_summary(aggregates[p]),
            "packets_total": {"mean": float(np.mean(packets)), "std": float(np.std(packets)), "values": packets},
            "rounds_executed_mean": float(np.mean([len(r.series) for r in results])),
        }
    summary = {"config": spec_to_dict(spec), "protocols": protocols}
    if Protocol.EECP.value in trials and Protocol.LEACH_HET.value in trials:
        summary["comparison_eecp_vs_leach_het"] = compare(
            trials[Protocol.EECP.value], trials[Protocol.LEACH_HET.value]
        )
    return summary


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> ExperimentResult:
    """Run every protocol x trial, then write all outputs in a fixed order."""
    out = Path(spec.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    seeds = [spec.seed(i) for i in range(spec.trials)]
    trials, aggregates = {}, {}
    for p in spec.protocols:
        log.info("running %d trial(s) of %s", spec.trials, p.value)
        trials[p.value] = run_trials(spec.config_for(p), seeds, jobs=jobs)
        aggregates[p.value] = aggregate_trials(trials[p.value])

    files = []
    for p, results in trials.items():
        pdir = out / p
        pdir.mkdir(parents=True, exist_ok=True)
        for i, r in enumerate(results):
            files.append(emit_csv(r.series, pdir / f"trial_{i}.csv"))
        files.append(emit_csv(aggregates[p].mean, pdir / "aggregate.csv"))
        files.append(emit_csv(aggregates[p].std, pdir / "aggregate_std.csv"))
    summary = summarize(spec, trials, aggregates)
    path = out / "summary.json"
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    files.append(path)
    if spec.emit_charts:
        files.append(emit_chart(aggregates, "milestones", out / "fig4.svg", spec.base.max_rounds))
        files.append(emit_chart(aggregates, "alive", out / "fig5.svg"))
        files.append(emit_chart(aggregates, "packets_cum", out / "fig6.svg"))
    return ExperimentResult(spec, trials, aggregates, summary, files)
