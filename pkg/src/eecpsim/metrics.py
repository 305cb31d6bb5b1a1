"""Lifetime milestones, per-round series and multi-trial aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .engine import SimulationTrace
from .model import NetworkConfig

SERIES_FIELDS = ("alive", "ch_count", "packets", "packets_cum", "residual_j")


@dataclass(frozen=True)
class LifetimeMilestones:
    """Round index of the first, half (ceil(N/2)) and last death; None if censored."""

    first_dead_round: Optional[int]
    half_dead_round: Optional[int]
    last_dead_round: Optional[int]

    def as_dict(self) -> dict:
        return {"first": self.first_dead_round, "half": self.half_dead_round, "last": self.last_dead_round}


@dataclass
class RoundSeries:
    round: np.ndarray
    alive: np.ndarray
    ch_count: np.ndarray
    packets: np.ndarray
    packets_cum: np.ndarray
    residual_j: np.ndarray

    def __len__(self):
        return len(self.round)

    @classmethod
    def empty(cls) -> "RoundSeries":
        z = np.zeros(0, dtype=int)
        return cls(z, z, z, z, z, np.zeros(0))


@dataclass
class TrialResult:
    """Everything the experiment keeps from one trace once the trace is dropped."""

    config: NetworkConfig
    seed: int
    series: RoundSeries
    milestones: LifetimeMilestones
    initial_energy: float
    final_energy: float
    spent_energy: float
    positions: np.ndarray = field(repr=False)
    gateways: np.ndarray = field(repr=False)

    @classmethod
    def from_trace(cls, trace: SimulationTrace) -> "TrialResult":
        spent = math.fsum(float(r.energy_spent.sum()) for r in trace.reports)
        return cls(
            config=trace.config,
            seed=trace.seed,
            series=per_round_series(trace),
            milestones=lifetime_milestones(trace),
            initial_energy=math.fsum(trace.initial_energy),
            final_energy=math.fsum(trace.final_energy),
            spent_energy=spent,
            positions=np.array([n.pos for n in trace.initial_nodes]),
            gateways=np.array([n.kind == "gateway" for n in trace.initial_nodes]),
        )


def lifetime_milestones(trace: SimulationTrace) -> LifetimeMilestones:
    if not trace.reports:
        raise ValueError("trace has no rounds")
    n = trace.config.n_nodes
    marks = {"first": 1, "half": math.ceil(n / 2), "last": n}
    found = {}
    dead = 0
    for report in trace.reports:
        dead += len(report.deaths)
        for name, needed in marks.items():
            if name not in found and dead >= needed:
                found[name] = report.round
    return LifetimeMilestones(found.get("first"), found.get("half"), found.get("last"))


def per_round_series(trace: SimulationTrace) -> RoundSeries:
    if not trace.reports:
        return RoundSeries.empty()
    reps = trace.reports
    packets = np.array([r.packets_to_bs for r in reps], dtype=int)
    return RoundSeries(
        round=np.array([r.round for r in reps], dtype=int),
        alive=np.array([r.alive_after for r in reps], dtype=int),
        ch_count=np.array([len(r.heads) for r in reps], dtype=int),
        packets=packets,
        packets_cum=np.cumsum(packets),
        residual_j=np.array([r.residual_energy for r in reps], dtype=float),
    )


@dataclass
class MilestoneStats:
    mean: Optional[float]          # over uncensored trials
    std: Optional[float]
    censored: int
    restricted_mean: float         # censored trials counted at max_rounds
    values: list


@dataclass
class AggregateSeries:
    mean: RoundSeries
    std: RoundSeries
    milestones: dict               # name -> MilestoneStats
    n_trials: int


def _pad(values: np.ndarray, length: int, hold: bool) -> np.ndarray:
    if len(values) == length:
        return values.astype(float)
    fill = values[-1] if hold and len(values) else 0
    return np.concatenate([values.astype(float), np.full(length - len(values), fill, dtype=float)])


def milestone_stats(values: Sequence[Optional[int]], max_rounds: int) -> MilestoneStats:
    seen = [v for v in values if v is not None]
    return MilestoneStats(
        mean=float(np.mean(seen)) if seen else None,
        std=float(np.std(seen)) if seen else None,
        censored=len(values) - len(seen),
        restricted_mean=float(np.mean([max_rounds if v is None else v for v in values])),
        values=list(values),
    )


def aggregate_trials(trials: Sequence) -> AggregateSeries:
    """Per-round mean/std across trials plus milestone statistics.

    Accepts traces or :class:`TrialResult` objects. Shorter trials are padded
    with their terminal state: alive, per-round packets and CH count go to 0,
    cumulative packets and residual energy are held.
    """
    if not trials:
        raise ValueError("need at least one trial")
    results = [t if isinstance(t, TrialResult) else TrialResult.from_trace(t) for t in trials]
    config = results[0].config
    if any(r.config != config for r in results[1:]):
        raise ValueError("cannot aggregate trials run with different configs")
    length = max(len(r.series) for r in results)
    hold = {"alive": False, "ch_count": False, "packets": False, "packets_cum": True, "residual_j": True}
    means, stds = {}, {}
    for name in SERIES_FIELDS:
        stack = np.vstack([_pad(getattr(r.series, name), length, hold[name]) for r in results])
        means[name] = stack.mean(axis=0)
        stds[name] = stack.std(axis=0)
    rounds = np.arange(length)
    stats = {
        name: milestone_stats([r.milestones.as_dict()[name] for r in results], config.max_rounds)
        for name in ("first", "half", "last")
    }
    return AggregateSeries(
        mean=RoundSeries(round=rounds, **means),
        std=RoundSeries(round=rounds.copy(), **stds),
        milestones=stats,
        n_trials=len(results),
    )
