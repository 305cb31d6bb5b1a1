"""Nodes, network configuration, deployment and geometry.

The network state stores node attributes as parallel numpy arrays indexed by
node id; :class:`Node` objects are read-only snapshots built on request.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .radio import RadioParams, rx_energy, tx_energy


class Point(NamedTuple):
    x: float
    y: float


class NodeKind(str, enum.Enum):
    NORMAL = "normal"
    GATEWAY = "gateway"


class Protocol(str, enum.Enum):
    LEACH_HET = "leach_het"
    EECP = "eecp"


class DAvgMode(str, enum.Enum):
    EMPIRICAL = "empirical"
    ANALYTIC = "analytic"


class ThresholdVariant(str, enum.Enum):
    LITERAL = "literal"
    CLAMPED_SCALING = "clamped_scaling"


@dataclass(frozen=True)
class Node:
    id: int
    pos: Point
    kind: NodeKind
    energy: float
    alive: bool = True
    epoch_elected: bool = False
    dist_to_bs: float = 0.0


@dataclass(frozen=True)
class NetworkConfig:
    n_nodes: int = 100
    field_side: float = 100.0
    gateway_fraction: float = 0.1
    energy_factor: float = 1.0
    initial_energy: float = 0.5
    bs_position: Optional[Point] = None  # None -> centre of the field
    radio: RadioParams = field(default_factory=RadioParams)
    p_opt: float = 0.1
    protocol: Protocol = Protocol.EECP
    d_avg_mode: DAvgMode = DAvgMode.EMPIRICAL
    threshold_variant: ThresholdVariant = ThresholdVariant.LITERAL
    relays: bool = True  # EECP only; False gives the no-relay ablation
    max_rounds: int = 10_000

    def __post_init__(self):
        # coerce plain strings / sequences so configs can come straight from JSON
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        object.__setattr__(self, "d_avg_mode", DAvgMode(self.d_avg_mode))
        object.__setattr__(self, "threshold_variant", ThresholdVariant(self.threshold_variant))
        if self.bs_position is None:
            half = self.field_side / 2
            object.__setattr__(self, "bs_position", Point(half, half))
        else:
            object.__setattr__(self, "bs_position", Point(*map(float, self.bs_position)))
        self.validate()

    def validate(self) -> None:
        if isinstance(self.n_nodes, bool) or int(self.n_nodes) != self.n_nodes or self.n_nodes < 1:
            raise ValueError(f"n_nodes must be an integer >= 1, got {self.n_nodes!r}")
        if not (self.field_side > 0 and math.isfinite(self.field_side)):
            raise ValueError(f"field_side must be > 0, got {self.field_side!r}")
        if not 0 <= self.gateway_fraction <= 1:
            raise ValueError(f"gateway_fraction must lie in [0, 1], got {self.gateway_fraction!r}")
        if not self.energy_factor >= 0:
            raise ValueError(f"energy_factor must be >= 0, got {self.energy_factor!r}")
        if not self.initial_energy > 0:
            raise ValueError(f"initial_energy must be > 0, got {self.initial_energy!r}")
        if not 0 < self.p_opt <= 1:
            raise ValueError(f"p_opt must lie in (0, 1], got {self.p_opt!r}")
        if int(self.max_rounds) != self.max_rounds or self.max_rounds < 1:
            raise ValueError(f"max_rounds must be an integer >= 1, got {self.max_rounds!r}")
        if not all(math.isfinite(c) for c in self.bs_position):
            raise ValueError(f"bs_position must be finite, got {self.bs_position!r}")
        if self.p_opt * self.n_nodes < 1:
            warnings.warn(
                f"p_opt * n_nodes = {self.p_opt * self.n_nodes:g} < 1; most rounds will elect no cluster head",
                stacklevel=3,
            )

    @property
    def n_gateways(self) -> int:
        # half-up rounding, not Python's banker's rounding
        return int(math.floor(self.gateway_fraction * self.n_nodes + 0.5))

    @property
    def epoch_length(self) -> int:
        return math.ceil(1 / self.p_opt - 1e-12)

    def replace(self, **changes) -> "NetworkConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class NetworkState:
    """Mutable, trial-confined network state."""

    config: NetworkConfig
    pos: np.ndarray            # (N, 2) float
    is_gateway: np.ndarray     # (N,) bool
    initial_energy: np.ndarray  # (N,) float
    energy: np.ndarray         # (N,) float, residual
    alive: np.ndarray          # (N,) bool
    epoch_elected: np.ndarray  # (N,) bool
    dist_to_bs: np.ndarray     # (N,) float
    rng: np.random.Generator
    round: int = 0
    _geometry: Optional["Geometry"] = field(default=None, repr=False, compare=False)
    _factor_cache: Optional[tuple] = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.energy)

    @property
    def bs(self) -> np.ndarray:
        return np.asarray(self.config.bs_position, dtype=float)

    def node(self, i: int) -> Node:
        return Node(
            id=int(i),
            pos=Point(float(self.pos[i, 0]), float(self.pos[i, 1])),
            kind=NodeKind.GATEWAY if self.is_gateway[i] else NodeKind.NORMAL,
            energy=float(self.energy[i]),
            alive=bool(self.alive[i]),
            epoch_elected=bool(self.epoch_elected[i]),
            dist_to_bs=float(self.dist_to_bs[i]),
        )

    @property
    def nodes(self) -> list[Node]:
        return [self.node(i) for i in range(self.n)]

    def alive_ids(self) -> np.ndarray:
        return np.flatnonzero(self.alive)

    @property
    def geometry(self) -> "Geometry":
        if self._geometry is None:
            self._geometry = Geometry.of(self)
        return self._geometry


@dataclass(frozen=True)
class Geometry:
    """Static per-trial lookups: pairwise distances and one-packet radio costs."""

    dist: np.ndarray      # (N, N)
    tx: np.ndarray        # (N, N) cost of one packet i -> j
    tx_bs: np.ndarray     # (N,) cost of one packet i -> sink
    rx: float
    index: np.ndarray     # arange(N)

    @classmethod
    def of(cls, state: "NetworkState") -> "Geometry":
        radio = state.config.radio
        L = radio.packet_bits
        diff = state.pos[:, None, :] - state.pos[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        return cls(
            dist, tx_energy(L, dist, radio), tx_energy(L, state.dist_to_bs, radio), rx_energy(L, radio), np.arange(len(dist))
        )


def build_network(
    config: NetworkConfig,
    positions: Sequence[Sequence[float]],
    gateway_ids: Iterable[int] = (),
    seed: int = 0,
) -> NetworkState:
    """Network with explicit node positions (hand-built instances, tests)."""
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    if len(pos) != config.n_nodes:
        raise ValueError(f"expected {config.n_nodes} positions, got {len(pos)}")
    if not np.all(np.isfinite(pos)):
        raise ValueError("node positions must be finite")
    is_gw = np.zeros(len(pos), dtype=bool)
    is_gw[list(gateway_ids)] = True
    return _make_state(config, pos, is_gw, np.random.default_rng(seed))


def deploy_network(config: NetworkConfig, seed: int) -> NetworkState:
    """Uniform random deployment over [0, M]^2 with randomly chosen gateways.

    RNG consumption order: N (x, y) pairs, then the gateway id draw; the
    same stream then feeds the per-round election draws.
    """
    config.validate()
    rng = np.random.default_rng(seed)
    n, side = config.n_nodes, config.field_side
    pos = rng.uniform(0.0, side, size=(n, 2))
    is_gw = np.zeros(n, dtype=bool)
    k = config.n_gateways
    if k:
        is_gw[rng.choice(n, size=k, replace=False)] = True
    return _make_state(config, pos, is_gw, rng)


def _make_state(config, pos, is_gw, rng) -> NetworkState:
    n = len(pos)
    e0 = config.initial_energy
    init = np.where(is_gw, e0 * (1 + config.energy_factor), e0).astype(float)
    bs = np.asarray(config.bs_position, dtype=float)
    return NetworkState(
        config=config,
        pos=pos,
        is_gateway=is_gw,
        initial_energy=init,
        energy=init.copy(),
        alive=np.ones(n, dtype=bool),
        epoch_elected=np.zeros(n, dtype=bool),
        dist_to_bs=np.hypot(pos[:, 0] - bs[0], pos[:, 1] - bs[1]),
        rng=rng,
    )


def distance(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def nearest(origin, candidates: Sequence[Node]) -> Optional[int]:
    """Id of the candidate closest to ``origin``; ties go to the lowest id."""
    best = None
    for node in candidates:
        key = (distance(origin, node.pos), node.id)
        if best is None or key < best:
            best = key
    return None if best is None else best[1]
