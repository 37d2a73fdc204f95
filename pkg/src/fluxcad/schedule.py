"""Time-segmented flux schedules: static versus dynamic cavity operation.

A schedule is a sequence of (duration, phi_q, phi_c) segments. Keeping the
cavity far detuned during free evolution protects the qubit from decay
through the cavity, while shifting it toward the qubit only for the
measurement window preserves readout strength; evaluating both against a
static schedule quantifies that trade-off. Decay is integrated piecewise
(the rate is constant within a segment), so survival is
``exp(-sum_i gamma_i * t_i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

from .coupling import dispersive_shift, inductive_coupling
from .errors import HybridizedSegment, UnstableBias, ZeroDetuning
from .loss import CavitySetting, combined_budget
from .params import CircuitParams
from .readout import ReadoutChannel, dispersive_snr
from .squid import (
    anharmonicity_perturbative,
    cavity_frequency_grid,
    qubit_branches,
    qubit_plasma_frequency,
)

SegmentMode = Literal["coherent", "measurement", "reset", "transit"]


@dataclass(frozen=True)
class FluxSegment:
    duration: float  # s
    phi_q: float
    phi_c: float
    mode: SegmentMode = "coherent"

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("segment duration must be non-negative")


@dataclass(frozen=True)
class FluxSchedule:
    """Segments plus the flux-state branch the qubit occupies.

    ``branch_id`` is the winding index pinned by the reset; a schedule that
    starts from a reset at zero flux occupies branch 0 (the default) even
    when later segments sit inside the hysteretic overlap.
    """

    segments: tuple[FluxSegment, ...]
    ramp_time: float = 0.0  # inserted between segments; rate taken at midpoint bias
    branch_id: int = 0

    def __post_init__(self):
        if self.ramp_time < 0:
            raise ValueError("ramp_time must be non-negative")

    @property
    def total_duration(self) -> float:
        ramps = self.ramp_time * max(0, len(self.segments) - 1)
        return sum(s.duration for s in self.segments) + ramps


@dataclass(frozen=True)
class SegmentDiagnostics:
    duration: float
    phi_q: float
    phi_c: float
    mode: str
    total_rate: float  # 1/s
    detuning: float  # rad/s
    g: float  # rad/s
    full_shift: float  # 2*chi, rad/s


@dataclass(frozen=True)
class ScheduleReport:
    survival_probability: float
    effective_t1: float  # s
    measurement_snr: float
    per_segment: tuple[SegmentDiagnostics, ...]


def _segment_rate(
    params: CircuitParams,
    phi_q: float,
    phi_c: float,
    q_dielectric: float,
    channel: ReadoutChannel,
    branch_id: int,
):
    """Total decay rate and diagnostics at one bias point on one branch."""
    stable = [b for b in qubit_branches(params, phi_q) if b.stable]
    matches = [b for b in stable if b.branch_id == branch_id]
    if not matches:
        raise UnstableBias(
            f"qubit branch {branch_id} has no stable minimum at phi_q={phi_q:.4f} "
            "(step edge crossed)"
        )
    branch = matches[0]

    omega_01 = 2.0 * math.pi * qubit_plasma_frequency(params, phi_q, branch)
    f_c = float(cavity_frequency_grid(params, [phi_c])[0])
    omega_c = 2.0 * math.pi * f_c
    g = inductive_coupling(params, omega_c).coupling
    delta = omega_01 - omega_c
    if abs(delta) < g:
        raise HybridizedSegment(
            f"segment at (phi_q={phi_q:.4f}, phi_c={phi_c:.4f}) has |detuning| "
            f"{abs(delta)/2/math.pi/1e6:.1f} MHz below g {g/2/math.pi/1e6:.1f} MHz"
        )

    setting = CavitySetting(omega_c=omega_c, kappa=channel.kappa, g=g)
    budget = combined_budget(params, setting, omega_01, q_dielectric)

    alpha = anharmonicity_perturbative(params, phi_q, branch)
    try:
        shift = dispersive_shift(g, delta, alpha, model="three_level").full_shift
    except ZeroDetuning:  # unreachable given the hybridization check
        shift = math.nan
    return budget.total_rate, delta, g, shift


def evaluate_schedule(
    params: CircuitParams,
    schedule: FluxSchedule,
    q_dielectric: float,
    channel: ReadoutChannel,
) -> ScheduleReport:
    """Survival probability, effective T1, and readout SNR for one schedule.

    The schedule's branch is tracked across segments; if it disappears the
    schedule is invalid (UnstableBias). SNR is evaluated on the first
    measurement-mode segment using that segment's lifetime; it is 0 when
    the schedule has no measurement segment.
    """
    if not schedule.segments:
        return ScheduleReport(1.0, math.inf, 0.0, ())

    branch_id = schedule.branch_id
    diagnostics: list[SegmentDiagnostics] = []
    exponent = 0.0
    measurement_snr = 0.0
    snr_found = False

    pieces: list[tuple[float, float, float, str]] = []
    for i, seg in enumerate(schedule.segments):
        if schedule.ramp_time > 0.0 and i > 0:
            prev = schedule.segments[i - 1]
            pieces.append(
                (
                    schedule.ramp_time,
                    0.5 * (prev.phi_q + seg.phi_q),
                    0.5 * (prev.phi_c + seg.phi_c),
                    "transit",
                )
            )
        pieces.append((seg.duration, seg.phi_q, seg.phi_c, seg.mode))

    for duration, phi_q, phi_c, mode in pieces:
        rate, delta, g, shift = _segment_rate(
            params, phi_q, phi_c, q_dielectric, channel, branch_id
        )
        exponent += rate * duration
        diagnostics.append(
            SegmentDiagnostics(
                duration=duration,
                phi_q=phi_q,
                phi_c=phi_c,
                mode=mode,
                total_rate=rate,
                detuning=delta,
                g=g,
                full_shift=shift,
            )
        )
        if mode == "measurement" and not snr_found:
            measurement_snr = dispersive_snr(channel, 1.0 / rate)
            snr_found = True

    total_time = sum(p[0] for p in pieces)
    effective_t1 = total_time / exponent if exponent > 0 else math.inf
    return ScheduleReport(
        survival_probability=math.exp(-exponent),
        effective_t1=effective_t1,
        measurement_snr=measurement_snr,
        per_segment=tuple(diagnostics),
    )


def compare_static_dynamic(
    params: CircuitParams,
    phi_q: float,
    coherent_phi_c: float,
    measurement_phi_c: float,
    evolve_time: float,
    measure_time: float,
    q_dielectric: float,
    channel: ReadoutChannel,
) -> tuple[ScheduleReport, ScheduleReport]:
    """Static (measurement cavity setting throughout) vs dynamic operation.

    Both schedules share the same measurement segment, so the readout SNR is
    identical by construction; survival differs only through the evolve
    window.
    """
    static = FluxSchedule(
        segments=(
            FluxSegment(evolve_time, phi_q, measurement_phi_c, "coherent"),
            FluxSegment(measure_time, phi_q, measurement_phi_c, "measurement"),
        )
    )
    dynamic = FluxSchedule(
        segments=(
            FluxSegment(evolve_time, phi_q, coherent_phi_c, "coherent"),
            FluxSegment(measure_time, phi_q, measurement_phi_c, "measurement"),
        )
    )
    return (
        evaluate_schedule(params, static, q_dielectric, channel),
        evaluate_schedule(params, dynamic, q_dielectric, channel),
    )
