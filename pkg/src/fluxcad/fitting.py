"""Nonlinear least-squares extraction of circuit parameters from spectroscopy.

Fits the flux-dependent cavity / qubit frequency models to measured sweeps
with a damped Gauss-Newton trust-region solver, plus flux-axis calibration
from the periodicity of the response. Bias points where a trial parameter
set has no stable branch are dropped with a constant penalty and counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.optimize import least_squares, minimize

from .errors import (
    ConfigError,
    InsufficientSpan,
    MaxIterations,
    ModelEvalFailure,
    SingularJacobian,
)
from .params import PHI0, CircuitParams, JunctionParams
from .readout import ResonatorLineShape, transmission
from .squid import cavity_frequency_grid, qubit_frequency_grid

SweepFlavor = Literal["cavity", "qubit"]

_PENALTY = 1e3  # weighted-residual value assigned to dropped points
_FTOL = 1e-10
_XTOL = 1e-12

# CircuitParams fields adjustable by the fitter, plus the two calibration
# parameters "flux_offset" and "flux_period" (raw bias-axis units).
_PARAM_GETTERS: dict[str, Callable[[CircuitParams], float]] = {
    "cavity_critical_current": lambda p: p.cavity_junction.critical_current,
    "qubit_critical_current": lambda p: p.qubit_junction.critical_current,
    "shunt_capacitance_cavity": lambda p: p.shunt_capacitance_cavity,
    "shunt_capacitance_qubit": lambda p: p.shunt_capacitance_qubit,
    "series_inductance": lambda p: p.series_inductance,
    "junction_arm_inductance": lambda p: p.junction_arm_inductance,
    "loop_inductance_cavity": lambda p: p.loop_inductance_cavity,
    "loop_inductance_qubit": lambda p: p.loop_inductance_qubit,
}

CALIBRATION_NAMES = ("flux_offset", "flux_period")
FREE_PARAM_NAMES = tuple(_PARAM_GETTERS) + CALIBRATION_NAMES


def _apply_params(base: CircuitParams, names, values) -> CircuitParams:
    changes = {}
    for name, value in zip(names, values):
        if name == "cavity_critical_current":
            changes["cavity_junction"] = JunctionParams(
                value, base.cavity_junction.self_capacitance
            )
        elif name == "qubit_critical_current":
            changes["qubit_junction"] = JunctionParams(
                value, base.qubit_junction.self_capacitance
            )
        elif name in _PARAM_GETTERS:
            changes[name] = value
    return base.with_values(**changes) if changes else base


@dataclass(frozen=True)
class SpectroscopySweep:
    """One measured frequency-versus-bias trace.

    ``bias`` is in raw units (coil current or programmed flux); the mapping
    to flux quanta is ``phi = (bias - flux_offset)/flux_period``. The sweep
    direction selects which hysteretic branch the data follow (the branch
    is pinned by the reset at the start of the sweep).
    """

    bias: np.ndarray
    frequency: np.ndarray  # Hz
    flavor: SweepFlavor
    uncertainty: np.ndarray | None = None  # Hz
    sweep_direction: Literal["up", "down"] = "up"

    def __post_init__(self):
        object.__setattr__(self, "bias", np.asarray(self.bias, dtype=float))
        object.__setattr__(self, "frequency", np.asarray(self.frequency, dtype=float))
        if self.uncertainty is not None:
            object.__setattr__(
                self, "uncertainty", np.asarray(self.uncertainty, dtype=float)
            )
        if len(self.bias) != len(self.frequency):
            raise ConfigError("bias and frequency lengths differ")
        if len(self.bias) < 8:
            raise ConfigError("sweep needs at least 8 points")
        if np.any(self.frequency <= 0):
            raise ConfigError("frequencies must be positive")

    def sigma(self) -> np.ndarray:
        if self.uncertainty is not None:
            return self.uncertainty
        return np.full(len(self.bias), 1e-3 * float(np.median(self.frequency)))


@dataclass(frozen=True)
class FluxCalibration:
    flux_period: float  # raw bias units per flux quantum
    flux_offset: float  # raw bias units at integer flux
    bias_mutual: float  # H, meaningful when the bias axis is in amperes


@dataclass
class FitProblem:
    """A sweep, a base parameter set, and the free parameters with bounds.

    ``free`` maps parameter names (see FREE_PARAM_NAMES) to
    (initial, lower, upper). Everything not named stays fixed at the value
    in ``base_params`` / the calibration defaults (period 1, offset 0,
    i.e. a bias axis already in flux quanta).
    """

    sweep: SpectroscopySweep
    base_params: CircuitParams
    free: dict[str, tuple[float, float, float]] = field(default_factory=dict)
    flux_offset: float = 0.0
    flux_period: float = 1.0
    qubit_branch: int | None = None  # default: winding nearest the sweep start

    def __post_init__(self):
        for name, (init, lo, hi) in self.free.items():
            if name not in FREE_PARAM_NAMES:
                raise ConfigError(f"unknown free parameter {name!r}")
            if not (lo <= init <= hi) or not (math.isfinite(lo) and math.isfinite(hi)):
                raise ConfigError(f"initial guess for {name!r} outside finite bounds")
        if len(self.sweep.bias) < 2 * max(1, len(self.free)):
            raise ConfigError("need at least twice as many data points as free parameters")


@dataclass(frozen=True)
class FitResult:
    best_params: CircuitParams
    calibration: FluxCalibration
    residual_rms: float  # Hz
    iterations: int
    converged: bool
    covariance_diag: dict[str, float]
    n_dropped: int


def _model_frequencies(
    params: CircuitParams,
    sweep: SpectroscopySweep,
    offset: float,
    period: float,
    qubit_branch: int | None,
) -> np.ndarray:
    phis = (sweep.bias - offset) / period
    if sweep.flavor == "cavity":
        return cavity_frequency_grid(params, phis)
    first = 0 if sweep.sweep_direction == "up" else -1
    branch = qubit_branch if qubit_branch is not None else round(float(phis[first]))
    return qubit_frequency_grid(params, phis, branch)


def _pack_problem(problem: FitProblem):
    """Scaled optimization variables: z = x / max(|x0|, eps), so z0 ~ 1.

    Working in relative units keeps the trust-region conditioning and the
    step-norm/decrease convergence thresholds meaningful across parameters
    whose SI magnitudes span many decades. ``split`` and ``residuals``
    accept the scaled vector.
    """
    names = list(problem.free)
    x0 = np.array([problem.free[n][0] for n in names])
    lo = np.array([problem.free[n][1] for n in names])
    hi = np.array([problem.free[n][2] for n in names])
    # parameters starting at zero (e.g. a flux offset) take their scale from
    # the bound half-width instead
    scales = np.maximum(np.abs(x0), np.maximum(0.5 * (hi - lo), 1e-30))
    z0 = x0 / scales
    zlo = lo / scales
    zhi = hi / scales
    sigma = problem.sweep.sigma()

    def split(z):
        x = np.asarray(z) * scales
        circuit = _apply_params(problem.base_params, names, x)
        offset = problem.flux_offset
        period = problem.flux_period
        for name, value in zip(names, x):
            if name == "flux_offset":
                offset = value
            elif name == "flux_period":
                period = value
        return circuit, offset, period

    def residuals(z):
        circuit, offset, period = split(z)
        model = _model_frequencies(
            circuit, problem.sweep, offset, period, problem.qubit_branch
        )
        r = (model - problem.sweep.frequency) / sigma
        return np.where(np.isfinite(r), r, _PENALTY)

    return names, z0, zlo, zhi, scales, split, residuals


def numeric_jacobian(residuals, x, rel_step: float = 3e-6) -> np.ndarray:
    """Centered-difference Jacobian of a vector residual function.

    Expects scale-normalized variables (all entries order one), so the step
    floor is 1.0; a parameter sitting at zero still gets a finite step.
    """
    x = np.asarray(x, dtype=float)
    r0 = residuals(x)
    jac = np.empty((len(r0), len(x)))
    for j in range(len(x)):
        h = rel_step * max(abs(x[j]), 1.0)
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (residuals(xp) - residuals(xm)) / (2.0 * h)
    return jac


def check_gradient_consistency(residuals, x, rel_step: float = 3e-6) -> float:
    """Relative mismatch between 2*J^T r and the finite-difference cost gradient.

    Both sides are centered differences of the same residual function; the
    check guards the Jacobian assembly used for covariance estimates.
    """
    x = np.asarray(x, dtype=float)
    r0 = residuals(x)
    grad_j = 2.0 * numeric_jacobian(residuals, x, rel_step).T @ r0

    cost = lambda v: float(np.sum(residuals(v) ** 2))
    grad_fd = np.empty(len(x))
    for j in range(len(x)):
        h = rel_step * max(abs(x[j]), 1.0)
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        grad_fd[j] = (cost(xp) - cost(xm)) / (2.0 * h)
    denom = max(float(np.linalg.norm(grad_fd)), 1e-300)
    return float(np.linalg.norm(grad_j - grad_fd) / denom)


def _covariance(jac: np.ndarray, cost: float, n_data: int, names, x_scale=None):
    """Diagonal covariance from J^T J; raises on parameter degeneracy.

    The rank analysis runs on the scale-normalized Jacobian so that the SI
    magnitudes of the parameters (which span many decades) do not masquerade
    as degeneracy; the reported singular direction is in per-parameter
    relative units.
    """
    if x_scale is None:
        x_scale = np.ones(jac.shape[1])
    scaled = jac * x_scale[np.newaxis, :]
    jtj = scaled.T @ scaled
    u, s, vt = np.linalg.svd(jtj)
    if s[0] == 0.0 or s[-1] / s[0] < 1e-12:
        direction = {n: float(v) for n, v in zip(names, vt[-1])}
        raise SingularJacobian(
            "fit Jacobian is singular; unresolved parameter direction "
            + ", ".join(f"{n}: {v:+.3f}" for n, v in direction.items()),
            direction=direction,
        )
    dof = max(n_data - len(names), 1)
    cov_scaled = np.linalg.inv(jtj) * (cost / dof)
    return {
        n: float(cov_scaled[i, i] * x_scale[i] ** 2) for i, n in enumerate(names)
    }


def fit_spectrum(problem: FitProblem, max_nfev: int = 2000) -> FitResult:
    """Weighted least-squares fit of a spectroscopy sweep.

    Uses a trust-region Gauss-Newton solver with bounds; if the Jacobian at
    the optimum is singular a derivative-free simplex polish is attempted
    before reporting the degeneracy. Points where the trial model has no
    stable branch receive a constant penalty and are reported in
    ``n_dropped``.
    """
    names, z0, zlo, zhi, scales, split, residuals = _pack_problem(problem)
    sigma = problem.sweep.sigma()

    def result_at(z, iterations, converged, cov):
        circuit, offset, period = split(z)
        model = _model_frequencies(
            circuit, problem.sweep, offset, period, problem.qubit_branch
        )
        good = np.isfinite(model)
        n_dropped = int(np.sum(~good))
        if n_dropped == len(model):
            raise ModelEvalFailure("no data point could be evaluated at the optimum")
        rms = float(
            np.sqrt(np.mean((model[good] - problem.sweep.frequency[good]) ** 2))
        )
        calib = FluxCalibration(
            flux_period=period, flux_offset=offset, bias_mutual=PHI0 / period
        )
        return FitResult(
            best_params=circuit,
            calibration=calib,
            residual_rms=rms,
            iterations=iterations,
            converged=converged,
            covariance_diag=cov,
            n_dropped=n_dropped,
        )

    if not names:
        return result_at(z0, 0, True, {})

    res = least_squares(
        residuals,
        z0,
        bounds=(zlo, zhi),
        method="trf",
        ftol=_FTOL,
        xtol=_XTOL,
        max_nfev=max_nfev,
    )
    if res.status == 0:
        raise MaxIterations(f"fit did not converge within {max_nfev} evaluations")

    z_best = res.x
    jac = numeric_jacobian(residuals, z_best)
    try:
        cov_z = _covariance(jac, 2.0 * res.cost, len(sigma), names)
    except SingularJacobian:
        # simplex fallback: degeneracy sometimes reflects a bad TRF corner
        simplex = minimize(
            lambda v: float(np.sum(residuals(v) ** 2)),
            z_best,
            method="Nelder-Mead",
            options={"maxiter": 2000, "xatol": 1e-12, "fatol": 1e-12},
        )
        z_best = np.clip(simplex.x, zlo, zhi)
        jac = numeric_jacobian(residuals, z_best)
        cov_z = _covariance(
            jac, float(np.sum(residuals(z_best) ** 2)), len(sigma), names
        )

    cov = {n: cov_z[n] * s**2 for n, s in zip(names, scales)}
    return result_at(z_best, res.nfev, True, cov)


# --- flux-axis calibration ----------------------------------------------------


def calibrate_flux_axis(sweep: SpectroscopySweep) -> FluxCalibration:
    """Flux period, offset, and bias-coil mutual from a multi-period sweep.

    The period comes from the first prominent autocorrelation peak of the
    detrended frequency trace (parabolically refined); the offset is the
    maximum-frequency point (symmetry center). The mutual ``PHI0/period``
    is meaningful when the bias axis is in amperes.
    """
    bias = sweep.bias
    freq = sweep.frequency
    steps = np.diff(bias)
    mean_step = float(np.mean(steps))
    if mean_step == 0 or np.max(np.abs(steps - mean_step)) > 1e-6 * abs(mean_step):
        raise ConfigError("calibration requires a uniformly spaced bias axis")

    signal = freq - np.mean(freq)
    n = len(signal)
    ac = np.correlate(signal, signal, mode="full")[n - 1 :]

    below = np.where(ac < 0)[0]
    if len(below) == 0:
        raise InsufficientSpan("sweep does not span two flux periods")
    start = below[0]
    m = start + int(np.argmax(ac[start:]))
    if m <= start or m >= n - 1 or ac[m] <= 0:
        raise InsufficientSpan("no secondary autocorrelation peak found")

    denom = ac[m - 1] - 2.0 * ac[m] + ac[m + 1]
    shift = 0.5 * (ac[m - 1] - ac[m + 1]) / denom if denom != 0 else 0.0
    lag = m + shift
    period = abs(lag * mean_step)
    if abs(bias[-1] - bias[0]) < 2.0 * period:
        raise InsufficientSpan("sweep spans fewer than two flux periods")

    imax = int(np.argmax(freq))
    offset = bias[imax]
    if 0 < imax < n - 1:
        d = freq[imax - 1] - 2.0 * freq[imax] + freq[imax + 1]
        if d != 0:
            offset = bias[imax] + 0.5 * (freq[imax - 1] - freq[imax + 1]) / d * mean_step

    return FluxCalibration(
        flux_period=period, flux_offset=float(offset), bias_mutual=PHI0 / period
    )


# --- resonance line-shape fit --------------------------------------------------


@dataclass(frozen=True)
class LineshapeFitResult:
    line: ResonatorLineShape
    residual_rms: float  # in |S21| units
    iterations: int
    converged: bool
    covariance_diag: dict[str, float]


def fit_lineshape(
    frequency: Sequence[float], s21_mag: Sequence[float], max_nfev: int = 4000
) -> LineshapeFitResult:
    """Fit |S21| of a notch dip for (f0, Qi, Qe, skew angle).

    Initial values come from the dip position, depth, and width; the trace
    must span several linewidths for the width estimate to make sense.
    """
    f = np.asarray(frequency, dtype=float)
    mag = np.asarray(s21_mag, dtype=float)
    if len(f) != len(mag) or len(f) < 16:
        raise ConfigError("need matching frequency/|S21| arrays with >= 16 points")

    imin = int(np.argmin(mag))
    f0_guess = f[imin]
    depth = max(1.0 - mag[imin], 1e-3)
    power_dip = 1.0 - mag**2
    half = power_dip.max() / 2.0
    above = np.where(power_dip >= half)[0]
    width = max(float(f[above[-1]] - f[above[0]]), float(np.ptp(f)) / (len(f) - 1))
    if float(np.ptp(f)) < 5.0 * width:
        raise InsufficientSpan("trace spans fewer than five linewidths")

    qc = f0_guess / width
    qe = qc / min(depth, 0.999)
    qi = 1.0 / max(1.0 / qc - 1.0 / qe, 1.0 / (1e9))

    scales = np.array([f0_guess, qi, qe, 1.0])

    def residuals(z):
        f0, qi_, qe_, theta = np.asarray(z) * scales
        line = ResonatorLineShape(f0, qi_, qe_, theta)
        return np.abs(transmission(line, f)) - mag

    z0 = np.array([1.0, 1.0, 1.0, 0.0])
    zlo = np.array([f.min(), 1.0, 1.0, -0.5 * math.pi]) / scales
    zhi = np.array([f.max(), 1e9, 1e9, 0.5 * math.pi]) / scales
    res = least_squares(
        residuals,
        z0,
        bounds=(zlo, zhi),
        method="trf",
        ftol=_FTOL,
        xtol=_XTOL,
        max_nfev=max_nfev,
    )
    if res.status == 0:
        raise MaxIterations(f"line-shape fit exceeded {max_nfev} evaluations")

    names = ("f0", "q_internal", "q_external", "skew_angle")
    jac = numeric_jacobian(residuals, res.x)
    cov_z = _covariance(jac, 2.0 * res.cost, len(f), names)
    cov = {n: cov_z[n] * s**2 for n, s in zip(names, scales)}
    line = ResonatorLineShape(*(res.x * scales))
    return LineshapeFitResult(
        line=line,
        residual_rms=float(np.sqrt(np.mean(residuals(res.x) ** 2))),
        iterations=res.nfev,
        converged=True,
        covariance_diag=cov,
    )


# --- synthetic data helpers (round-trip tests, CLI fixtures) -------------------


def synthesize_sweep(
    params: CircuitParams,
    flavor: SweepFlavor,
    phi_min: float,
    phi_max: float,
    n_points: int,
    noise_rel: float = 0.0,
    seed: int | None = None,
    flux_offset: float = 0.0,
    flux_period: float = 1.0,
    qubit_branch: int = 0,
) -> SpectroscopySweep:
    """Model-generated sweep, optionally with multiplicative Gaussian noise."""
    phis = np.linspace(phi_min, phi_max, n_points)
    bias = phis * flux_period + flux_offset
    if flavor == "cavity":
        freq = cavity_frequency_grid(params, phis)
    else:
        freq = qubit_frequency_grid(params, phis, qubit_branch)
    if np.any(~np.isfinite(freq)):
        raise ModelEvalFailure("synthesis window leaves the stable branch")
    if noise_rel > 0.0:
        rng = np.random.default_rng(seed)
        freq = freq * (1.0 + noise_rel * rng.standard_normal(n_points))
    return SpectroscopySweep(bias=bias, frequency=freq, flavor=flavor)
