"""First-order radio energy model.

Short hops (inside a cluster) pay an amplifier cost growing with d**2, the
long hop from a head to the base station pays d**4.  Receiving includes the
per-bit aggregation cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RadioParams:
    """Energy coefficients of the radio, all in joules per bit."""

    e_elec: float = 50e-9            # J/bit, tx/rx electronics
    eps_amp_long: float = 0.0013e-12  # J/bit/m^4
    eps_amp_short: float = 100e-12    # J/bit/m^2
    e_agg: float = 5e-9              # J/bit, aggregation on receive

    def __post_init__(self):
        for name in ("e_elec", "eps_amp_long", "eps_amp_short", "e_agg"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")

    def scaled(self, factor: float) -> "RadioParams":
        return RadioParams(
            self.e_elec * factor,
            self.eps_amp_long * factor,
            self.eps_amp_short * factor,
            self.e_agg * factor,
        )


def _check(l, d=0.0) -> None:
    # accepts scalars or numpy arrays of distances
    if np.any(np.asarray(l) < 0):
        raise ValueError(f"message length must be >= 0, got {l!r}")
    if np.any(np.asarray(d) < 0):
        raise ValueError(f"distance must be >= 0, got {d!r}")


def tx_energy_long(l: float, d: float, p: RadioParams) -> float:
    """Energy to send ``l`` bits over ``d`` meters with the d**4 amplifier."""
    _check(l, d)
    return l * p.e_elec + l * p.eps_amp_long * d**4


def tx_energy_short(l: float, d: float, p: RadioParams) -> float:
    """Energy to send ``l`` bits over ``d`` meters with the d**2 amplifier."""
    _check(l, d)
    return l * p.e_elec + l * p.eps_amp_short * d**2


def rx_energy(l: float, p: RadioParams) -> float:
    """Energy to receive and aggregate ``l`` bits."""
    _check(l)
    return l * (p.e_elec + p.e_agg)


def crossover_distance(p: RadioParams) -> float:
    """Distance above which the d**4 amplifier costs more than the d**2 one."""
    if p.eps_amp_long == 0:
        return math.inf
    return math.sqrt(p.eps_amp_short / p.eps_amp_long)
