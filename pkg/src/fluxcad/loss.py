"""Qubit energy-decay budget: readout-cavity, bias-line, and dielectric loss.

Three channels are combined into a total rate ``gamma_T`` and lifetime
``T1 = 1/gamma_T`` over qubit-frequency sweeps:

* cavity-mediated decay through the feedline (single tunable mode),
  ``gamma_P = (g/delta01)**2 * kappa / (1 + delta01/(2*omega_c))**2``
* flux-bias-coil loading, ``gamma_qB = (MqB/Lq_loop)**2 / (Zo*Cq)``
  (frequency independent)
* dielectric loss, ``gamma_d = omega_01 / Q_d``.

Grid points where the qubit and cavity hybridize (|delta01| < g) are
excluded from spectra with an explicit gap marker rather than
extrapolated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

from .errors import OnResonance
from .params import CircuitParams

ChannelKind = Literal["purcell", "bias_line", "dielectric"]


@dataclass(frozen=True)
class DecayChannel:
    kind: ChannelKind
    rate: float  # 1/s

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("decay rate must be non-negative")


@dataclass(frozen=True)
class CavitySetting:
    """One readout-cavity operating point: frequency, linewidth, coupling.

    ``kappa`` is an input per setting (the measured linewidth varies
    between operating points), not derived from a fixed external Q.
    """

    omega_c: float  # rad/s
    kappa: float  # rad/s
    g: float  # rad/s

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")


@dataclass(frozen=True)
class LossBudget:
    qubit_freq: float  # rad/s
    channels: tuple[DecayChannel, ...]
    total_rate: float  # 1/s
    t1_total: float  # s

    def channel_rate(self, kind: ChannelKind) -> float:
        for ch in self.channels:
            if ch.kind == kind:
                return ch.rate
        raise KeyError(kind)


@dataclass(frozen=True)
class T1SpectrumPoint:
    """One sweep point; ``budget`` is None inside the hybridization gap."""

    qubit_freq: float  # rad/s
    budget: LossBudget | None

    @property
    def in_gap(self) -> bool:
        return self.budget is None


def purcell_rate(setting: CavitySetting, omega_01: float) -> DecayChannel:
    """Qubit decay through the cavity's feedline at one qubit frequency.

    Raises OnResonance when |delta01| < g, where the dispersive derivation
    breaks down; callers should exclude such points.
    """
    delta = omega_01 - setting.omega_c
    if abs(delta) < setting.g:
        raise OnResonance(
            f"|detuning| {abs(delta):.3e} below coupling {setting.g:.3e}; "
            "qubit and cavity hybridized"
        )
    if delta == -2.0 * setting.omega_c:
        raise ValueError("purcell rate undefined at delta01 = -2*omega_c")
    rate = (setting.g / delta) ** 2 * setting.kappa / (1.0 + delta / (2.0 * setting.omega_c)) ** 2
    return DecayChannel(kind="purcell", rate=rate)


def bias_line_rate(params: CircuitParams) -> DecayChannel:
    """Energy loss into the qubit flux-bias coil (frequency independent)."""
    ratio = params.bias_mutual_qubit / params.loop_inductance_qubit
    rate = ratio**2 / (params.feedline_impedance * params.shunt_capacitance_qubit)
    return DecayChannel(kind="bias_line", rate=rate)


def dielectric_rate(omega_01: float, q_dielectric: float) -> DecayChannel:
    """Dielectric loss omega_01/Q_d."""
    if q_dielectric <= 0:
        raise ValueError("Q_d must be positive")
    return DecayChannel(kind="dielectric", rate=omega_01 / q_dielectric)


def combined_budget(
    params: CircuitParams,
    setting: CavitySetting,
    omega_01: float,
    q_dielectric: float,
) -> LossBudget:
    """Total decay rate and per-channel breakdown at one qubit frequency."""
    channels = (
        purcell_rate(setting, omega_01),
        bias_line_rate(params),
        dielectric_rate(omega_01, q_dielectric),
    )
    total = sum(ch.rate for ch in channels)
    return LossBudget(
        qubit_freq=omega_01,
        channels=channels,
        total_rate=total,
        t1_total=1.0 / total,
    )


def t1_spectrum(
    params: CircuitParams,
    setting: CavitySetting,
    qubit_freq_grid: Sequence[float],
    q_dielectric: float,
) -> list[T1SpectrumPoint]:
    """Loss budget over a grid of qubit frequencies (rad/s).

    Hybridized points (|delta01| < g) are kept in the output with a gap
    marker instead of a budget.
    """
    points = []
    for omega_01 in qubit_freq_grid:
        if abs(omega_01 - setting.omega_c) < setting.g:
            points.append(T1SpectrumPoint(qubit_freq=omega_01, budget=None))
        else:
            points.append(
                T1SpectrumPoint(
                    qubit_freq=omega_01,
                    budget=combined_budget(params, setting, omega_01, q_dielectric),
                )
            )
    return points


def peak_t1(spectrum: Sequence[T1SpectrumPoint]) -> float:
    """Largest T1 (s) over the non-gap points of a spectrum."""
    values = [p.budget.t1_total for p in spectrum if p.budget is not None]
    if not values:
        raise OnResonance("entire grid lies inside the hybridization gap")
    return max(values)
