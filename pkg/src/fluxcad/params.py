"""Circuit parameter containers.

All quantities are SI (henries, farads, amperes, ohms). The CLI layer
converts to and from the conventional reporting units (nH, pF, uA, GHz,
flux in units of the flux quantum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy.constants import physical_constants

PHI0 = physical_constants["mag. flux quantum"][0]

# Flux biases are plain floats in units of the flux quantum; periodicity is
# handled by the operations, not by a wrapper type.
FluxBias = float


def josephson_inductance(critical_current: float) -> float:
    """Zero-flux Josephson inductance of a junction with the given Ic."""
    return PHI0 / (2.0 * math.pi * critical_current)


@dataclass(frozen=True)
class JunctionParams:
    """A single Josephson junction: critical current and self-capacitance.

    The self-capacitance is carried for completeness (it matters for the
    extended fit models) but does not enter the closed-form frequency
    expressions used here.
    """

    critical_current: float  # A
    self_capacitance: float = 0.0  # F

    def __post_init__(self):
        if self.critical_current <= 0:
            raise ValueError("junction critical current must be positive")
        if self.self_capacitance < 0:
            raise ValueError("junction self-capacitance must be non-negative")

    @property
    def inductance(self) -> float:
        return josephson_inductance(self.critical_current)


@dataclass(frozen=True)
class CircuitParams:
    """Full electrical description of one coupled cavity-qubit design.

    ``loop_inductance_*`` are the total rf-SQUID loop inductances including
    the shared mutual. ``series_inductance`` sits between the cavity shunt
    capacitor and its SQUID loop; ``junction_arm_inductance`` is in series
    with the qubit junction.
    """

    loop_inductance_cavity: float  # H
    loop_inductance_qubit: float  # H
    series_inductance: float  # H
    junction_arm_inductance: float  # H
    shared_mutual: float  # H
    shunt_capacitance_cavity: float  # F
    shunt_capacitance_qubit: float  # F
    cavity_junction: JunctionParams
    qubit_junction: JunctionParams
    bias_mutual_cavity: float  # H
    bias_mutual_qubit: float  # H
    feedline_impedance: float = 50.0  # ohm

    def __post_init__(self):
        positive = {
            "loop_inductance_cavity": self.loop_inductance_cavity,
            "loop_inductance_qubit": self.loop_inductance_qubit,
            "series_inductance": self.series_inductance,
            "shared_mutual": self.shared_mutual,
            "shunt_capacitance_cavity": self.shunt_capacitance_cavity,
            "shunt_capacitance_qubit": self.shunt_capacitance_qubit,
            "bias_mutual_cavity": self.bias_mutual_cavity,
            "bias_mutual_qubit": self.bias_mutual_qubit,
            "feedline_impedance": self.feedline_impedance,
        }
        for name, value in positive.items():
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if self.junction_arm_inductance < 0:
            raise ValueError("junction_arm_inductance must be non-negative")
        if self.shared_mutual >= min(
            self.loop_inductance_cavity, self.loop_inductance_qubit
        ):
            raise ValueError("shared mutual must be smaller than either loop inductance")
        for beta in (self.beta_cavity, self.beta_qubit, self.beta_arm):
            if not math.isfinite(beta) or beta < 0:
                raise ValueError("screening parameters must be finite and non-negative")

    # -- derived screening parameters ----------------------------------

    @property
    def beta_cavity(self) -> float:
        """Cavity loop inductance over cavity Josephson inductance."""
        return self.loop_inductance_cavity / self.cavity_junction.inductance

    @property
    def beta_qubit(self) -> float:
        """Qubit loop inductance over qubit Josephson inductance."""
        return self.loop_inductance_qubit / self.qubit_junction.inductance

    @property
    def beta_arm(self) -> float:
        """Junction-arm inductance over qubit Josephson inductance."""
        return self.junction_arm_inductance / self.qubit_junction.inductance

    @property
    def beta_qubit_total(self) -> float:
        """Total screening parameter entering qubit flux quantization."""
        return self.beta_qubit + self.beta_arm

    # -- bare LC frequencies (rad/s) -------------------------------------

    @property
    def omega_cavity_bare(self) -> float:
        return 1.0 / math.sqrt(
            self.loop_inductance_cavity * self.shunt_capacitance_cavity
        )

    @property
    def omega_qubit_bare(self) -> float:
        return 1.0 / math.sqrt(
            self.loop_inductance_qubit * self.shunt_capacitance_qubit
        )

    @property
    def omega_series(self) -> float:
        """Resonance of the series inductor with the cavity shunt capacitor."""
        return 1.0 / math.sqrt(self.series_inductance * self.shunt_capacitance_cavity)

    def with_values(self, **changes) -> "CircuitParams":
        """Return a copy with the given fields replaced."""
        return replace(self, **changes)
