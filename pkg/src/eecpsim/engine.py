"""One protocol round (setup + steady state) and the full simulation loop."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional

import numpy as np

from .election import elect_cluster_heads, resolve_avg_distance
from .model import NetworkConfig, NetworkState, Node, NodeKind, Protocol, deploy_network, distance, nearest
from .radio import aggregation_energy

DIRECT_TO_BS = -1   # membership target for a no-head round
NOT_MEMBER = -2     # heads and dead nodes


@dataclass(frozen=True)
class ClusterAssignment:
    heads: tuple
    target: np.ndarray  # per node id: head id, DIRECT_TO_BS or NOT_MEMBER

    @property
    def membership(self) -> dict:
        return {int(i): int(self.target[i]) for i in np.flatnonzero(self.target != NOT_MEMBER)}

    def members_of(self, head: int) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.target == head)]


class UplinkRoute(NamedTuple):
    ch_id: int
    via: Optional[int] = None  # relaying gateway id, None for a direct uplink

    @property
    def direct(self) -> bool:
        return self.via is None


@dataclass
class RoundReport:
    round: int
    heads: tuple
    assignment: ClusterAssignment
    relay_of: np.ndarray  # per head (same order as heads): relaying gateway id or -1
    energy_spent: np.ndarray
    packets_to_bs: int
    deaths: tuple
    alive_after: int
    residual_energy: float

    @property
    def routes(self) -> list[UplinkRoute]:
        return [UplinkRoute(h, None if g < 0 else g) for h, g in zip(self.heads, self.relay_of.tolist())]


@dataclass
class SimulationTrace:
    config: NetworkConfig
    seed: int
    d_avg: float
    initial_nodes: list
    initial_energy: np.ndarray
    final_energy: np.ndarray
    reports: list = field(default_factory=list)

    @property
    def n_rounds(self) -> int:
        return len(self.reports)


def form_clusters(state: NetworkState, heads: Iterable[int]) -> ClusterAssignment:
    """Attach each alive non-head to its nearest head (lowest id on ties)."""
    heads = np.asarray(sorted(int(h) for h in heads), dtype=int)
    if len(heads) and not state.alive[heads].all():
        raise ValueError("cluster heads must be alive")
    return _form_clusters(state, heads)


def _form_clusters(state: NetworkState, heads: np.ndarray) -> ClusterAssignment:
    # heads: sorted ascending, all alive
    if len(heads) == 0:
        target = np.where(state.alive, DIRECT_TO_BS, NOT_MEMBER)
    else:
        # argmin keeps the first minimum and heads are sorted, so ties go to the lowest id
        # dist is symmetric; row gathers are much cheaper than column gathers
        closest = heads[state.geometry.dist[heads].argmin(axis=0)]
        target = np.where(state.alive, closest, NOT_MEMBER)
        target[heads] = NOT_MEMBER
    return ClusterAssignment(heads=tuple(heads.tolist()), target=target)


def _relay_candidates(state: NetworkState, heads) -> np.ndarray:
    ok = state.alive & state.is_gateway
    ok[np.asarray(heads, dtype=int)] = False
    return ok.nonzero()[0]


def _relays_enabled(config: NetworkConfig) -> bool:
    return config.protocol is Protocol.EECP and config.relays


def choose_uplink(ch: Node, state: NetworkState, heads) -> UplinkRoute:
    """Direct to the sink, or via the nearest free gateway if that is closer than the sink."""
    if not _relays_enabled(state.config) or ch.kind is NodeKind.GATEWAY:
        return UplinkRoute(ch.id)
    best = nearest(ch.pos, [state.node(g) for g in _relay_candidates(state, list(heads))])
    if best is not None and distance(ch.pos, state.node(best).pos) < ch.dist_to_bs:
        return UplinkRoute(ch.id, best)
    return UplinkRoute(ch.id)


def _relay_targets(state: NetworkState, heads: np.ndarray) -> np.ndarray:
    """Relay gateway per head, -1 for a direct uplink (vectorised choose_uplink)."""
    via = np.full(len(heads), -1, dtype=int)
    if not _relays_enabled(state.config) or len(heads) == 0:
        return via
    gws = _relay_candidates(state, heads)
    normal = ~state.is_gateway[heads]
    if len(gws) == 0 or not normal.any():
        return via
    hs = heads[normal]
    d = state.geometry.dist[gws][:, hs]
    j = d.argmin(axis=0)
    closer = d.min(axis=0) < state.dist_to_bs[hs]
    via[normal] = np.where(closer, gws[j], -1)
    return via


def run_round(state: NetworkState, d_avg: float, heads: Optional[Iterable[int]] = None) -> RoundReport:
    """Execute one round and advance ``state.round``.

    ``heads`` forces the cluster-head set; no election draws are consumed then.
    Costs are charged in full but a node never spends more than it holds; a
    node left at 0 J is marked dead after the round, and everything it sent
    during the round is still delivered.
    """
    if not state.alive.any():
        raise RuntimeError("run_round called on a network with no alive nodes")
    cfg = state.config
    radio = cfg.radio
    geo = state.geometry

    if heads is None:
        heads = np.asarray(elect_cluster_heads(state, d_avg), dtype=int)
        assignment = _form_clusters(state, heads)
    else:
        if state.round % cfg.epoch_length == 0:
            state.epoch_elected[state.alive] = False
        assignment = form_clusters(state, heads)
        heads = np.asarray(assignment.heads, dtype=int)
        state.epoch_elected[heads] = True
    target = assignment.target
    packets = 0

    # members -> head
    is_member = target >= 0
    cost = np.where(is_member, geo.tx[geo.index, np.where(is_member, target, 0)], 0.0)
    received = np.bincount(target[is_member], minlength=state.n)
    cost += received * geo.rx

    # heads: aggregate own + members' signals, then one uplink packet
    via = _relay_targets(state, heads)
    if len(heads):
        relayed = via >= 0
        uplink = np.where(relayed, geo.tx[heads, np.where(relayed, via, heads)], geo.tx_bs[heads])
        cost[heads] += aggregation_energy(radio.packet_bits, received[heads] + 1, radio) + uplink
        if relayed.any():
            gws = via[relayed]
            cost += np.bincount(gws, weights=geo.rx + geo.tx_bs[gws], minlength=state.n)
        packets += len(heads)

    lone = target == DIRECT_TO_BS
    if lone.any():
        cost[lone] += geo.tx_bs[lone]
        packets += int(lone.sum())

    spent = np.minimum(cost, state.energy)
    state.energy -= spent
    dying = state.alive & (state.energy <= 0)
    deaths = ()
    if dying.any():
        state.alive &= ~dying
        deaths = tuple(dying.nonzero()[0].tolist())

    report = RoundReport(
        round=state.round,
        heads=assignment.heads,
        assignment=assignment,
        relay_of=via,
        energy_spent=spent,
        packets_to_bs=packets,
        deaths=deaths,
        alive_after=int(state.alive.sum()),
        residual_energy=float(state.energy.sum()),
    )
    state.round += 1
    return report


def run_simulation(config: NetworkConfig, seed: int) -> SimulationTrace:
    config.validate()
    state = deploy_network(config, seed)
    d_avg = resolve_avg_distance(state)
    trace = SimulationTrace(
        config=config,
        seed=seed,
        d_avg=d_avg,
        initial_nodes=state.nodes,
        initial_energy=state.initial_energy.copy(),
        final_energy=state.energy,
    )
    while state.alive.any() and state.round < config.max_rounds:
        trace.reports.append(run_round(state, d_avg))
    trace.final_energy = state.energy.copy()
    return trace
