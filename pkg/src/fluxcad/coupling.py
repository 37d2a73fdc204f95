"""Qubit-cavity coupling strength and dispersive shifts.

With a shared mutual inductor the exchange coupling depends on the loop
currents, which grow as each SQUID's Josephson inductance grows, so the
coupling strength *increases* as the cavity is tuned down:

    g(omega_c) = g0 * [ omega_c0/omega_c - (omega_c0/omega_s**2) * omega_c ]

with ``g0 = omega_q0 * M / (2*sqrt(Lq_loop * Lc_loop))`` and
``omega_s`` the series-inductor/shunt-capacitor resonance. A coupling
capacitor instead gives ``g = omega_c * C / (2*sqrt(Cq*Cc))``, linear and
rising with cavity frequency; both are provided for comparison curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import OutOfRange, StraddlingBoundary, ZeroDetuning
from .params import CircuitParams
from .squid import cavity_band

ShiftModel = Literal["two_level", "three_level"]


@dataclass(frozen=True)
class CouplingPoint:
    """Coupling at one cavity frequency. All frequencies in rad/s.

    ``qubit_freq`` is the constant bare qubit LC frequency that sets the
    scale ``g0`` (no qubit-flux dependence is modeled), so ``detuning``
    here is relative to that fixed reference. ``weak_coupling_ok`` flags
    points where g stays below a tenth of the cavity frequency, the
    regime where the expression above was derived.
    """

    cavity_freq: float
    qubit_freq: float
    coupling: float
    detuning: float
    g0: float
    omega_series: float
    omega_cavity_bare: float
    omega_qubit_bare: float
    weak_coupling_ok: bool


@dataclass(frozen=True)
class DispersiveShift:
    chi: float  # rad/s
    full_shift: float  # 2*chi, rad/s
    model: ShiftModel
    anharmonicity: float  # rad/s
    dispersive_ok: bool  # |detuning| >= 5 g (advisory)


def bare_coupling(params: CircuitParams) -> float:
    """g0 in rad/s."""
    return (
        params.omega_qubit_bare
        * params.shared_mutual
        / (
            2.0
            * math.sqrt(params.loop_inductance_qubit * params.loop_inductance_cavity)
        )
    )


def cavity_tunable_range(params: CircuitParams) -> tuple[float, float]:
    """(omega_min, omega_max) of the cavity in rad/s."""
    f_min, f_max = cavity_band(params)
    return 2.0 * math.pi * f_min, 2.0 * math.pi * f_max


_BAND_MARGIN = 0.02  # the closed-form band edge neglects junction capacitance;
# measured maxima sit slightly above it, so the range check carries a margin


def inductive_coupling(params: CircuitParams, omega_c: float) -> CouplingPoint:
    """Coupling through the shared mutual at cavity frequency ``omega_c`` (rad/s).

    Raises OutOfRange outside the tunable band (within a small margin, see
    above). The coupling decreases monotonically with cavity frequency
    across the physical band and never reaches zero inside it.
    """
    w_min, w_max = cavity_tunable_range(params)
    if not (w_min * (1.0 - _BAND_MARGIN) <= omega_c <= w_max * (1.0 + _BAND_MARGIN)):
        raise OutOfRange(
            f"cavity frequency {omega_c/2/math.pi/1e9:.4f} GHz outside tunable band "
            f"[{w_min/2/math.pi/1e9:.4f}, {w_max/2/math.pi/1e9:.4f}] GHz"
        )
    g0 = bare_coupling(params)
    wc0 = params.omega_cavity_bare
    ws = params.omega_series
    g = g0 * (wc0 / omega_c - (wc0 / ws**2) * omega_c)
    wq0 = params.omega_qubit_bare
    return CouplingPoint(
        cavity_freq=omega_c,
        qubit_freq=wq0,
        coupling=g,
        detuning=wq0 - omega_c,
        g0=g0,
        omega_series=ws,
        omega_cavity_bare=wc0,
        omega_qubit_bare=wq0,
        weak_coupling_ok=abs(g) <= 0.1 * omega_c,
    )


def capacitive_coupling_comparison(
    c_coupling: float, c_qubit: float, c_cavity: float, omega_c: float
) -> CouplingPoint:
    """Comparison curve for a single coupling capacitor between the shunts."""
    if c_coupling < 0:
        raise ValueError("coupling capacitance must be non-negative")
    g = omega_c * c_coupling / (2.0 * math.sqrt(c_qubit * c_cavity))
    return CouplingPoint(
        cavity_freq=omega_c,
        qubit_freq=omega_c,
        coupling=g,
        detuning=0.0,
        g0=g,
        omega_series=math.inf,
        omega_cavity_bare=omega_c,
        omega_qubit_bare=omega_c,
        weak_coupling_ok=abs(g) <= 0.1 * omega_c,
    )


def dispersive_shift(
    g: float, delta01: float, alpha: float = math.nan, model: ShiftModel = "three_level"
) -> DispersiveShift:
    """Qubit-state-dependent cavity pull chi (and full shift 2*chi).

    ``three_level`` divides the two-level result ``g**2/delta01`` by
    ``1 + delta01/alpha``, capturing the suppression from the qubit's
    second transition. Inside the straddling interval the factor changes
    sign; the value is reported as-is. The ``dispersive_ok`` flag is
    advisory (|delta01| >= 5g), never an error.
    """
    if delta01 == 0.0:
        raise ZeroDetuning("dispersive shift undefined at zero detuning")
    chi2 = g * g / delta01
    if model == "two_level":
        chi = chi2
    elif model == "three_level":
        if math.isnan(alpha):
            raise ValueError("three_level model requires an anharmonicity")
        factor = 1.0 + delta01 / alpha
        if factor == 0.0:
            raise StraddlingBoundary(
                "detuning equals minus the anharmonicity (pole of the shift)"
            )
        chi = chi2 / factor
    else:
        raise ValueError(f"unknown dispersive model {model!r}")
    return DispersiveShift(
        chi=chi,
        full_shift=2.0 * chi,
        model=model,
        anharmonicity=alpha,
        dispersive_ok=abs(delta01) >= 5.0 * abs(g),
    )


def critical_photon_number(g: float, delta01: float) -> float:
    """Photon number (delta01 / 2g)**2 bounding the dispersive approximation."""
    if g <= 0:
        raise ValueError("coupling must be positive")
    return (delta01 / (2.0 * g)) ** 2


def normal_mode_frequencies(
    omega_01: float, omega_c: float, g: float
) -> tuple[float, float]:
    """Eigenfrequencies (rad/s) of the one-excitation block; split 2g on resonance."""
    if g < 0:
        raise ValueError("coupling must be non-negative")
    mean = 0.5 * (omega_01 + omega_c)
    delta = omega_01 - omega_c
    split = math.sqrt(0.25 * delta * delta + g * g)
    return mean - split, mean + split
