"""Round-based simulator for EECP and heterogeneous LEACH in wireless sensor networks."""

from .model import NetworkConfig, NodeKind, Protocol, DAvgMode, ThresholdVariant, deploy_network
from .radio import RadioParams
from .engine import run_round, run_simulation
from .experiment import ExperimentSpec, parse_config, run_experiment

__all__ = [
    "NetworkConfig", "NodeKind", "Protocol", "DAvgMode", "ThresholdVariant", "deploy_network",
    "RadioParams", "run_round", "run_simulation", "ExperimentSpec", "parse_config", "run_experiment",
]
