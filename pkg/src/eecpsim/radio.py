"""First-order radio dissipation model (free-space / multipath)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class RadioParams:
    """Per-bit radio costs. Defaults are the reference parameter table.

    ``d0_override`` replaces the crossover distance derived from the two
    amplifier coefficients (the reference table lists 70 m, which does not
    agree with sqrt(eps_fs / eps_mp) ~= 87.71 m).
    """

    e_elec: float = 5e-9        # J/bit, transmitter/receiver electronics
    eps_fs: float = 10e-12      # J/bit/m^2
    eps_mp: float = 0.0013e-12  # J/bit/m^4
    e_da: float = 5e-9          # J/bit/signal
    packet_bits: int = 4000
    d0_override: Optional[float] = None

    def __post_init__(self):
        for name in ("e_elec", "eps_fs", "eps_mp", "e_da"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if int(self.packet_bits) != self.packet_bits or self.packet_bits < 1:
            raise ValueError(f"packet_bits must be an integer >= 1, got {self.packet_bits!r}")
        if self.d0_override is not None and not self.d0_override > 0:
            raise ValueError(f"d0_override must be > 0, got {self.d0_override!r}")

    @cached_property
    def d0(self) -> float:
        if self.d0_override is not None:
            return float(self.d0_override)
        return crossover_distance(self.eps_fs, self.eps_mp)


def crossover_distance(eps_fs: float, eps_mp: float) -> float:
    """Distance at which eps_fs * d^2 == eps_mp * d^4."""
    if not (eps_fs > 0 and eps_mp > 0):
        raise ValueError(f"amplifier coefficients must be positive (eps_fs={eps_fs!r}, eps_mp={eps_mp!r})")
    return math.sqrt(eps_fs / eps_mp)


def tx_energy(bits, d, params: RadioParams):
    """Energy to transmit ``bits`` over distance ``d``.

    Works elementwise when ``d`` is an array; scalar input returns a float.
    """
    d0 = params.d0
    if np.ndim(d) == 0:
        d = float(d)
        if d < 0:
            raise ValueError(f"distance must be >= 0, got {d!r}")
        if d < d0:
            return bits * params.e_elec + bits * params.eps_fs * d ** 2
        return bits * params.e_elec + bits * params.eps_mp * d ** 4
    d = np.asarray(d, dtype=float)
    amp = np.where(d < d0, bits * params.eps_fs * d ** 2, bits * params.eps_mp * d ** 4)
    return bits * params.e_elec + amp


def rx_energy(bits, params: RadioParams) -> float:
    return bits * params.e_elec


def aggregation_energy(bits, signal_count, params: RadioParams):
    """Cost of fusing ``signal_count`` signals (members plus the head's own reading)."""
    if (signal_count < 1).any() if isinstance(signal_count, np.ndarray) else signal_count < 1:
        raise ValueError("signal_count must be >= 1 (the head always aggregates its own reading)")
    return params.e_da * bits * signal_count
