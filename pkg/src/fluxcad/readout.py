"""Cavity line-shape model, tunneling-readout optimization, dispersive SNR.

The cavity notch response is modeled as a skewed Lorentzian dip,

    S21(f) = 1 - (Qc/Qe) * exp(i*theta) / (1 + 2i*Qc*(f/f0 - 1)),

with loaded quality factor ``1/Qc = 1/Qi + 1/Qe``. For tunneling readout
the two qubit flux states shift the cavity resonance through the shared
mutual; the optimizer finds the cavity flux maximizing
(dip depth / dip width) * |df_c/dphi_c|.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyGrid, SingleBranch
from .params import PHI0, CircuitParams
from .squid import SquidBranch, cavity_band, cavity_frequency_grid, qubit_branches


@dataclass(frozen=True)
class ResonatorLineShape:
    """Notch-resonance parameters; the loaded Q is derived, never stored."""

    f0: float  # Hz
    q_internal: float
    q_external: float
    skew_angle: float = 0.0  # rad

    def __post_init__(self):
        if self.f0 <= 0 or self.q_internal <= 0 or self.q_external <= 0:
            raise ValueError("f0 and quality factors must be positive")

    @property
    def q_loaded(self) -> float:
        return loaded_q(self.q_internal, self.q_external)


@dataclass(frozen=True)
class ReadoutChannel:
    """Measurement-chain description for dispersive readout."""

    kappa: float  # rad/s
    noise_photons: float = 0.0  # added by the amplifier chain
    bandwidth: float = math.inf  # rad/s
    drive_photons: float = 0.0

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.noise_photons < 0 or self.drive_photons < 0:
            raise ValueError("photon numbers must be non-negative")

    @property
    def efficiency(self) -> float:
        return 1.0 / (self.noise_photons + 1.0)

    @property
    def bandwidth_adequate(self) -> bool:
        return self.bandwidth >= self.kappa


@dataclass(frozen=True)
class TunnelingReadoutPoint:
    """Readout figure of merit at one cavity flux.

    The flux-state dip separation follows from the slope of the cavity
    tuning curve and the flux the two qubit circulating currents induce in
    the cavity loop. ``figure_of_merit`` is
    (dip_depth/dip_width) * |slope|, slope in Hz per flux quantum.
    """

    phi_c: float
    f_dip_state0: float  # Hz
    f_dip_state1: float  # Hz
    dip_depth: float  # linear amplitude
    dip_width: float  # Hz
    slope: float  # Hz per flux quantum
    figure_of_merit: float

    @property
    def separation(self) -> float:
        return abs(self.f_dip_state0 - self.f_dip_state1)

    @property
    def well_separated(self) -> bool:
        return self.separation > self.dip_width


@dataclass(frozen=True)
class TunnelingReadoutResult:
    best: TunnelingReadoutPoint
    trace: tuple[TunnelingReadoutPoint, ...]
    no_optimum: bool


def loaded_q(q_internal: float, q_external: float) -> float:
    """Combine internal and external quality factors."""
    if q_internal <= 0 or q_external <= 0:
        raise ValueError("quality factors must be positive")
    return 1.0 / (1.0 / q_internal + 1.0 / q_external)


def transmission(line: ResonatorLineShape, f):
    """Complex S21 of the notch model; accepts scalar or array frequency."""
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequency must be positive")
    qc = line.q_loaded
    dip = (qc / line.q_external) * np.exp(1j * line.skew_angle)
    s21 = 1.0 - dip / (1.0 + 2j * qc * (f / line.f0 - 1.0))
    return s21 if s21.ndim else complex(s21)


def dip_depth(line: ResonatorLineShape) -> float:
    """On-resonance amplitude dip 1 - |S21(f0)|."""
    return 1.0 - abs(transmission(line, line.f0))


def dip_fwhm(line: ResonatorLineShape, n_scan: int = 20001) -> float:
    """Full width at half depth of the power dip 1 - |S21|^2, by numeric scan.

    In the power convention this equals f0/Qc for any dip depth (the
    amplitude-dip width does not, so widths here are power widths).
    """
    qc = line.q_loaded
    span = 6.0 * line.f0 / qc
    f = np.linspace(line.f0 - span, line.f0 + span, n_scan)
    dip = 1.0 - np.abs(transmission(line, f)) ** 2
    half = dip.max() / 2.0
    above = np.where(dip >= half)[0]
    return float(f[above[-1]] - f[above[0]])


def cavity_response_time(kappa: float) -> float:
    """Amplitude response time 2/kappa in seconds."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    return 2.0 / kappa


def cavity_flux_slope(params: CircuitParams, phi_c: float, step: float = 1e-5) -> float:
    """df_c/dphi_c in Hz per flux quantum by centered finite difference."""
    f = cavity_frequency_grid(params, np.array([phi_c - step, phi_c + step]))
    return float((f[1] - f[0]) / (2.0 * step))


def induced_cavity_flux_shift(params: CircuitParams, branch_pair: Sequence[SquidBranch]) -> float:
    """Cavity-loop flux difference (in flux quanta) between two qubit states."""
    if len(branch_pair) != 2:
        raise SingleBranch("two qubit flux states required")
    ic = params.qubit_junction.critical_current
    di = ic * (
        math.sin(branch_pair[0].junction_phase) - math.sin(branch_pair[1].junction_phase)
    )
    return params.shared_mutual * di / PHI0


def flux_state_cavity_shift(
    params: CircuitParams, phi_c: float, branch_pair: Sequence[SquidBranch]
) -> float:
    """Cavity dip separation (Hz) between the two qubit flux states.

    Linearized: slope of the cavity tuning curve times the induced flux
    difference. Vanishes at the cavity sweet spot where the slope is zero.
    """
    stable = [b for b in branch_pair if b.stable]
    if len(stable) < 2:
        raise SingleBranch(
            "readout requires two stable qubit branches (bias the qubit at the "
            "overlap region, phi_q near +-0.5)"
        )
    slope = cavity_flux_slope(params, phi_c)
    dphi = induced_cavity_flux_shift(params, stable[:2])
    return abs(slope) * abs(dphi)


# --- dip models for the tunneling-readout optimizer --------------------------


class ConstantDipModel:
    """Flux-independent dip depth and width (quality factors held constant)."""

    def __init__(self, depth: float, width_hz: float):
        if depth <= 0 or width_hz <= 0:
            raise ValueError("dip depth and width must be positive")
        self.depth = depth
        self.width_hz = width_hz

    @classmethod
    def from_lineshape(cls, line: ResonatorLineShape) -> "ConstantDipModel":
        return cls(depth=dip_depth(line), width_hz=line.f0 / line.q_loaded)

    def __call__(self, phi_c: float) -> tuple[float, float]:
        return self.depth, self.width_hz


class TabulatedDipModel:
    """Measured dip depth/width versus cavity flux, linearly interpolated."""

    def __init__(self, phi: Sequence[float], depth: Sequence[float], width_hz: Sequence[float]):
        self.phi = np.asarray(phi, dtype=float)
        self.depth = np.asarray(depth, dtype=float)
        self.width_hz = np.asarray(width_hz, dtype=float)
        if not (len(self.phi) == len(self.depth) == len(self.width_hz)) or len(self.phi) < 2:
            raise ValueError("need at least two tabulated points of equal length")
        order = np.argsort(self.phi)
        self.phi, self.depth, self.width_hz = (
            self.phi[order],
            self.depth[order],
            self.width_hz[order],
        )

    @classmethod
    def from_csv(cls, path) -> "TabulatedDipModel":
        phis, depths, widths = [], [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                phis.append(float(row["phi_c"]))
                depths.append(float(row["depth_linear"]))
                widths.append(float(row["width_Hz"]))
        return cls(phis, depths, widths)

    def __call__(self, phi_c: float) -> tuple[float, float]:
        d = float(np.interp(phi_c, self.phi, self.depth))
        w = float(np.interp(phi_c, self.phi, self.width_hz))
        return d, w


def optimize_tunneling_readout(
    params: CircuitParams,
    dip_model,
    phi_c_grid: Sequence[float],
    readout_phi_q: float = 0.5,
) -> TunnelingReadoutResult:
    """Find the cavity flux maximizing flux-state discrimination.

    Evaluates (depth/width) * |slope| on the grid, with the dip frequencies
    of the two qubit flux states computed from the induced cavity-flux
    shift at the qubit readout spot. ``no_optimum`` is set when the figure
    of merit vanishes everywhere (flat tuning curve).
    """
    grid = list(phi_c_grid)
    if not grid:
        raise EmptyGrid("empty cavity-flux grid")

    pair = [b for b in qubit_branches(params, readout_phi_q) if b.stable]
    if len(pair) < 2:
        raise SingleBranch(
            f"qubit bias {readout_phi_q} has {len(pair)} stable branch(es); "
            "readout needs two"
        )
    dphi = induced_cavity_flux_shift(params, pair[:2])

    f_lo, f_hi = cavity_band(params)
    slope_floor = 1e-9 * (f_hi - f_lo)

    trace = []
    for phi_c in grid:
        slope = cavity_flux_slope(params, phi_c)
        if abs(slope) < slope_floor:
            slope = 0.0
        f_states = cavity_frequency_grid(
            params, np.array([phi_c + 0.5 * dphi, phi_c - 0.5 * dphi])
        )
        depth, width = dip_model(phi_c)
        trace.append(
            TunnelingReadoutPoint(
                phi_c=float(phi_c),
                f_dip_state0=float(f_states[0]),
                f_dip_state1=float(f_states[1]),
                dip_depth=depth,
                dip_width=width,
                slope=slope,
                figure_of_merit=(depth / width) * abs(slope),
            )
        )

    best = max(trace, key=lambda p: p.figure_of_merit)
    return TunnelingReadoutResult(
        best=best, trace=tuple(trace), no_optimum=best.figure_of_merit == 0.0
    )


# --- dispersive readout metrics ----------------------------------------------


def dispersive_snr(channel: ReadoutChannel, t1: float) -> float:
    """Maximum readout SNR 2*n*kappa*T1*eta.

    The drive level must respect the critical photon number; that check is
    the caller's (advisory, not enforced here).
    """
    if t1 < 0:
        raise ValueError("T1 must be non-negative")
    return 2.0 * channel.drive_photons * channel.kappa * t1 * channel.efficiency


def dispersive_phase_signal(chi: float, kappa: float) -> float:
    """Outgoing-signal phase shift arctan(2*chi/kappa) in radians.

    Saturates at pi/2; the SNR-optimal operating condition is 2*chi = kappa
    (phase pi/4).
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    return math.atan2(2.0 * chi, kappa)
