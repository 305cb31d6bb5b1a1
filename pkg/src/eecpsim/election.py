"""Cluster-head election thresholds and the average distance-to-sink."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import NetworkState, NodeKind, Protocol, ThresholdVariant, DAvgMode


@dataclass(frozen=True)
class ThresholdInputs:
    p: float
    round: int
    eligible: bool
    d_i: float
    d_avg: float
    kind: NodeKind = NodeKind.NORMAL


@dataclass(frozen=True)
class AnalyticDistances:
    k_opt: float
    d_to_ch: float
    d_to_bs: float
    d_avg: float


def epoch_length(p: float) -> int:
    return math.ceil(1 / p - 1e-12)


def standard_threshold(p: float, round: int, eligible: bool) -> float:
    """Rotating LEACH threshold p / (1 - p (r mod 1/p)), clamped to [0, 1]."""
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    if not eligible:
        return 0.0
    t = p / (1 - p * (round % epoch_length(p)))
    return min(max(t, 0.0), 1.0)


def eecp_threshold(inputs: ThresholdInputs, variant=ThresholdVariant.LITERAL) -> float:
    """Distance-scaled threshold.

    Literal: normal nodes closer to the sink than ``d_avg`` get the standard
    threshold scaled by (1 - d_i/d_avg); everything else (far normal nodes,
    every gateway) gets the standard threshold unchanged.
    ClampedScaling: every normal node is scaled by max(0, 1 - d_i/d_avg).
    """
    if not inputs.d_avg > 0:
        raise ValueError(f"d_avg must be > 0, got {inputs.d_avg!r}")
    base = standard_threshold(inputs.p, inputs.round, inputs.eligible)
    if base == 0.0 or inputs.kind == NodeKind.GATEWAY:
        return base
    ratio = inputs.d_i / inputs.d_avg
    variant = ThresholdVariant(variant)
    if variant is ThresholdVariant.LITERAL:
        factor = 1 - ratio if inputs.d_i < inputs.d_avg else 1.0
    else:
        factor = max(0.0, 1 - ratio)
    return min(max(base * factor, 0.0), 1.0)


def distance_factor(state: NetworkState, d_avg: float) -> np.ndarray:
    """Per-node multiplier applied to the standard threshold (1 for gateways and LEACH)."""
    cfg = state.config
    if cfg.protocol is not Protocol.EECP:
        return np.ones(state.n)
    if not d_avg > 0:
        raise ValueError(f"d_avg must be > 0, got {d_avg!r}")
    ratio = state.dist_to_bs / d_avg
    if cfg.threshold_variant is ThresholdVariant.LITERAL:
        factor = np.where(state.dist_to_bs < d_avg, 1 - ratio, 1.0)
    else:
        factor = np.maximum(0.0, 1 - ratio)
    return np.where(state.is_gateway, 1.0, factor)


def thresholds(state: NetworkState, d_avg: float) -> np.ndarray:
    """Threshold of every node at the current round; dead and already-elected nodes get 0."""
    cached = state._factor_cache
    if cached is None or cached[0] != d_avg:
        cached = (d_avg, distance_factor(state, d_avg))
        state._factor_cache = cached
    base = standard_threshold(state.config.p_opt, state.round, True)
    t = np.minimum(base * cached[1], 1.0)
    t[state.epoch_elected] = 0.0
    t[~state.alive] = 0.0
    return t


def empirical_avg_distance(state: NetworkState) -> float:
    """Mean distance to the sink over every deployed node."""
    if state.n == 0:
        raise ValueError("cannot average over an empty network")
    return float(np.mean(state.dist_to_bs))


def optimal_cluster_count(n_nodes, field_side, d_bs, eps_fs, eps_mp) -> float:
    if not d_bs > 0:
        raise ValueError(f"d_bs must be > 0, got {d_bs!r}")
    for name, v in (("n_nodes", n_nodes), ("field_side", field_side), ("eps_fs", eps_fs), ("eps_mp", eps_mp)):
        if not v > 0:
            raise ValueError(f"{name} must be > 0, got {v!r}")
    return (math.sqrt(n_nodes) / math.sqrt(2 * math.pi)) * math.sqrt(eps_fs / eps_mp) * field_side / d_bs ** 2


def analytic_avg_distance(n_nodes, field_side, eps_fs, eps_mp) -> AnalyticDistances:
    """Closed-form average distance for a uniform field with a centred sink."""
    d_to_bs = 0.765 * field_side / 2
    k = optimal_cluster_count(n_nodes, field_side, d_to_bs, eps_fs, eps_mp)
    d_to_ch = field_side / math.sqrt(2 * k * math.pi)
    return AnalyticDistances(k_opt=k, d_to_ch=d_to_ch, d_to_bs=d_to_bs, d_avg=d_to_ch + d_to_bs)


def resolve_avg_distance(state: NetworkState) -> float:
    cfg = state.config
    if cfg.d_avg_mode is DAvgMode.ANALYTIC:
        return analytic_avg_distance(cfg.n_nodes, cfg.field_side, cfg.radio.eps_fs, cfg.radio.eps_mp).d_avg
    return empirical_avg_distance(state)


def elect_cluster_heads(state: NetworkState, d_avg: float, rng=None) -> list[int]:
    """Run one election and return the elected ids in ascending order.

    Eligibility resets at epoch boundaries; then one uniform draw is taken per
    alive node in ascending id order.
    """
    rng = state.rng if rng is None else rng
    if state.round % state.config.epoch_length == 0:
        state.epoch_elected[state.alive] = False
    t = thresholds(state, d_avg)
    alive = state.alive.nonzero()[0]
    heads = alive[rng.random(len(alive)) < t[alive]]
    state.epoch_elected[heads] = True
    return heads.tolist()
