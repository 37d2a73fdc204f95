"""Single rf-SQUID physics: flux quantization, potentials, level structure.

An rf SQUID threaded by an external flux ``phi`` (in units of the flux
quantum) has junction phases set by flux quantization,

    2*pi*phi = beta_eff * sin(delta) + delta,

with ``beta_eff`` the loop's total screening parameter. Each solution is a
branch of the folded-washboard potential

    u(delta) = (delta - 2*pi*phi)**2 / 2 - beta_eff * cos(delta)

in reduced units (energy scale ``(PHI0/2pi)**2 / L_loop``). Minima satisfy
``1 + beta_eff*cos(delta) > 0``; for ``beta_eff > 1`` there is a flux window
with two coexisting minima (hysteresis).

The Josephson term uses the loop's *total* screening parameter so that the
stationary points of the potential coincide exactly with the flux
quantization roots above; for the qubit flavor this lumps the junction-arm
inductance into an effective junction (arm/loop ratio is ~0.1 for the
designs here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.constants import e as ECHARGE
from scipy.constants import h as HPLANCK
from scipy.constants import hbar as HBAR
from scipy.linalg import eigvalsh_tridiagonal

from .errors import NoConvergence, OutOfRange, UnstableBranch, WellTooShallow
from .params import PHI0, CircuitParams

Flavor = Literal["cavity", "qubit"]

_DEFAULT_TOL = 1e-12
_REFINE_CAP = 200


@dataclass(frozen=True)
class SquidBranch:
    """One flux-quantization solution.

    Branches returned by :func:`solve_flux_quantization` carry *reduced*
    units: energies in ``(PHI0/2pi)**2 / L_loop`` and current in units of
    the junction critical current. The flavor wrappers
    :func:`cavity_branches` / :func:`qubit_branches` return SI (joules,
    amperes). ``well_depth`` equals the escape barrier (energy up to the
    lowest adjacent saddle) and is 0 for unstable extrema, ``inf`` when the
    well has no adjacent saddle at all.
    """

    junction_phase: float
    stable: bool
    well_depth: float
    barrier_height: float
    circulating_current: float
    branch_id: int


@dataclass(frozen=True)
class PotentialProfile:
    phase_grid: np.ndarray
    energy: np.ndarray
    minima: tuple[SquidBranch, ...]


@dataclass(frozen=True)
class QubitLevels:
    """Lowest three well eigenenergies and the derived transition data."""

    e0: float  # J
    e1: float  # J
    e2: float  # J
    f01: float  # Hz
    f12: float  # Hz
    anharmonicity: float  # rad/s
    relative_anharmonicity: float


def reduced_potential(delta, phi: float, beta_eff: float):
    """Washboard potential in reduced units (works on arrays)."""
    d = np.asarray(delta, dtype=float)
    return 0.5 * (d - 2.0 * math.pi * phi) ** 2 - beta_eff * np.cos(d)


def quantization_residual(delta, phi: float, beta_eff: float):
    """2*pi*phi - beta_eff*sin(delta) - delta; zero on a branch."""
    d = np.asarray(delta, dtype=float)
    return 2.0 * math.pi * phi - beta_eff * np.sin(d) - d


def _winding_index(delta: float) -> int:
    # nearest winding; the half-way tie (saddles at delta = pi + 2*pi*k) is
    # snapped upward consistently so ids shift by exactly 1 per flux quantum
    x = delta / (2.0 * math.pi) + 0.5
    nearest = round(x)
    if abs(x - nearest) < 1e-9:
        return int(nearest)
    return int(math.floor(x))


def _refine_root(phi, beta, lo, hi, tol):
    """Safeguarded bisection-then-Newton refinement inside a sign-change bracket."""
    f = lambda d: quantization_residual(d, phi, beta)
    flo = f(lo)
    if flo == 0.0:
        return lo
    if f(hi) == 0.0:
        return hi
    a, b = (lo, hi) if flo > 0 else (hi, lo)  # f(a) > 0 > f(b)
    x = 0.5 * (a + b)
    for _ in range(_REFINE_CAP):
        fx = f(x)
        if abs(fx) < tol:
            return x
        if fx > 0:
            a = x
        else:
            b = x
        # Newton step; keep only if it stays inside the current bracket
        slope = -(1.0 + beta * math.cos(x))
        if slope != 0.0:
            xn = x - fx / slope
            if min(a, b) < xn < max(a, b):
                x = xn
                continue
        x = 0.5 * (a + b)
    raise NoConvergence(
        f"flux-quantization root refinement stalled at residual {abs(f(x)):.3e} "
        f"(tol {tol:.1e}, beta_eff {beta:.3g}, phi {phi:.6g})"
    )


def solve_flux_quantization(
    beta_eff: float, phi: float, tol: float = _DEFAULT_TOL
) -> list[SquidBranch]:
    """All flux-quantization roots at one bias, classified by stability.

    Roots are bracketed on a uniform phase grid spanning
    ``[2*pi*phi - beta_eff - pi, 2*pi*phi + beta_eff + pi]`` with step
    ``<= pi / (8*(1+beta_eff))`` (fine enough that adjacent roots never
    share a bracket), then refined by bisection-then-Newton down to the
    residual tolerance. Returns branches sorted by junction phase, in
    reduced units (see :class:`SquidBranch`).
    """
    if beta_eff <= 0:
        raise ValueError("beta_eff must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    center = 2.0 * math.pi * phi
    lo = center - beta_eff - math.pi
    hi = center + beta_eff + math.pi
    step = math.pi / (8.0 * (1.0 + beta_eff))
    n = int(math.ceil((hi - lo) / step)) + 1
    grid = np.linspace(lo, hi, n)
    res = quantization_residual(grid, phi, beta_eff)

    roots: list[float] = []
    for i in range(n - 1):
        if res[i] == 0.0:
            roots.append(float(grid[i]))
        elif res[i] * res[i + 1] < 0.0:
            roots.append(_refine_root(phi, beta_eff, grid[i], grid[i + 1], tol))
    if res[-1] == 0.0:
        roots.append(float(grid[-1]))
    roots = sorted(set(round(r, 14) for r in roots))

    deduped: list[float] = []
    for r in roots:
        if not deduped or abs(r - deduped[-1]) > 1e-9:
            deduped.append(r)

    stable = [1.0 + beta_eff * math.cos(r) > 0.0 for r in deduped]
    energies = [float(reduced_potential(r, phi, beta_eff)) for r in deduped]

    branches = []
    for k, (r, st) in enumerate(zip(deduped, stable)):
        if st:
            saddles = []
            if k > 0 and not stable[k - 1]:
                saddles.append(energies[k - 1])
            if k + 1 < len(deduped) and not stable[k + 1]:
                saddles.append(energies[k + 1])
            barrier = min(saddles) - energies[k] if saddles else math.inf
            depth = barrier
        else:
            barrier = 0.0
            depth = 0.0
        branches.append(
            SquidBranch(
                junction_phase=r,
                stable=st,
                well_depth=depth,
                barrier_height=barrier,
                circulating_current=math.sin(r),
                branch_id=_winding_index(r),
            )
        )
    return branches


def _flavor_constants(params: CircuitParams, flavor: Flavor):
    if flavor == "cavity":
        return (
            params.beta_cavity,
            params.loop_inductance_cavity,
            params.cavity_junction.critical_current,
        )
    if flavor == "qubit":
        return (
            params.beta_qubit_total,
            params.loop_inductance_qubit,
            params.qubit_junction.critical_current,
        )
    raise ValueError(f"unknown SQUID flavor {flavor!r}")


def _to_si(branch: SquidBranch, loop_inductance: float, i_crit: float) -> SquidBranch:
    scale = (PHI0 / (2.0 * math.pi)) ** 2 / loop_inductance
    return SquidBranch(
        junction_phase=branch.junction_phase,
        stable=branch.stable,
        well_depth=branch.well_depth * scale,
        barrier_height=branch.barrier_height * scale,
        circulating_current=branch.circulating_current * i_crit,
        branch_id=branch.branch_id,
    )


def cavity_branches(
    params: CircuitParams, phi: float, tol: float = _DEFAULT_TOL
) -> list[SquidBranch]:
    """Cavity-SQUID branches at one bias, energies in joules."""
    beta, loop, ic = _flavor_constants(params, "cavity")
    return [_to_si(b, loop, ic) for b in solve_flux_quantization(beta, phi, tol)]


def qubit_branches(
    params: CircuitParams, phi: float, tol: float = _DEFAULT_TOL
) -> list[SquidBranch]:
    """Qubit-SQUID branches at one bias, energies in joules."""
    beta, loop, ic = _flavor_constants(params, "qubit")
    return [_to_si(b, loop, ic) for b in solve_flux_quantization(beta, phi, tol)]


def stable_branches(branches: Sequence[SquidBranch]) -> list[SquidBranch]:
    return [b for b in branches if b.stable]


def _check_branch(params: CircuitParams, phi: float, branch: SquidBranch, flavor: Flavor):
    if not branch.stable:
        raise UnstableBranch(f"{flavor} branch at delta={branch.junction_phase:.4f} is not a stable minimum")
    beta, _, _ = _flavor_constants(params, flavor)
    res = quantization_residual(branch.junction_phase, phi, beta)
    if abs(res) > 1e-6:
        raise ValueError(
            f"branch (delta={branch.junction_phase:.6f}) does not satisfy flux "
            f"quantization at phi={phi:.6f} (residual {res:.2e})"
        )


def cavity_frequency(params: CircuitParams, phi: float, branch: SquidBranch) -> float:
    """Flux-tunable cavity plasma frequency in Hz.

    The series inductor between the shunt capacitor and the SQUID loop
    flattens the flux dependence near the maximum frequency. Junction
    self-capacitance is neglected.
    """
    _check_branch(params, phi, branch, "cavity")
    y = 1.0 + params.beta_cavity * math.cos(branch.junction_phase)
    ratio = params.series_inductance / params.loop_inductance_cavity
    omega = params.omega_cavity_bare * math.sqrt(y) / math.sqrt(1.0 + y * ratio)
    return omega / (2.0 * math.pi)


def qubit_plasma_frequency(params: CircuitParams, phi: float, branch: SquidBranch) -> float:
    """Qubit plasma frequency (harmonic transition estimate) in Hz."""
    _check_branch(params, phi, branch, "qubit")
    c = math.cos(branch.junction_phase)
    num = 1.0 + params.beta_qubit_total * c
    den = 1.0 + params.beta_arm * c
    omega = params.omega_qubit_bare * math.sqrt(num / den)
    return omega / (2.0 * math.pi)


def circulating_current(params: CircuitParams, branch: SquidBranch, flavor: Flavor) -> float:
    """Loop current Io*sin(delta); the sign encodes the circulation sense."""
    _, _, ic = _flavor_constants(params, flavor)
    return ic * math.sin(branch.junction_phase)


def potential_profile(
    params: CircuitParams, phi: float, flavor: Flavor, n_grid: int = 4097
) -> PotentialProfile:
    """Potential energy (J) on a phase grid covering all wells plus margins."""
    beta, loop, ic = _flavor_constants(params, flavor)
    branches = solve_flux_quantization(beta, phi)
    deltas = [b.junction_phase for b in branches]
    lo = min(deltas) - math.pi
    hi = max(deltas) + math.pi
    grid = np.linspace(lo, hi, n_grid)
    scale = (PHI0 / (2.0 * math.pi)) ** 2 / loop
    energy = scale * reduced_potential(grid, phi, beta)
    minima = tuple(_to_si(b, loop, ic) for b in branches if b.stable)
    return PotentialProfile(phase_grid=grid, energy=energy, minima=minima)


# --- qubit level structure ---------------------------------------------------


def _well_walls(beta: float, phi: float, delta0: float, cap_reduced: float):
    """Hard-wall positions: adjacent saddles, or the energy-cap phase."""
    branches = solve_flux_quantization(beta, phi)
    deltas = [b.junction_phase for b in branches]
    stable = [b.stable for b in branches]
    idx = int(np.argmin([abs(d - delta0) for d in deltas]))
    u0 = float(reduced_potential(delta0, phi, beta))

    def energy_wall(sign):
        d = delta0
        step = 0.01
        while float(reduced_potential(d, phi, beta)) - u0 < cap_reduced:
            d += sign * step
        return d

    left = None
    if idx > 0 and not stable[idx - 1]:
        left = deltas[idx - 1]
    right = None
    if idx + 1 < len(deltas) and not stable[idx + 1]:
        right = deltas[idx + 1]

    saddle_energies = [
        float(reduced_potential(d, phi, beta)) for d in (left, right) if d is not None
    ]
    barrier_top = min(saddle_energies) if saddle_energies else math.inf

    if left is None:
        left = energy_wall(-1.0)
    if right is None:
        right = energy_wall(+1.0)
    return left, right, barrier_top, u0


def qubit_levels(
    params: CircuitParams, phi: float, branch: SquidBranch, n_grid: int = 2048
) -> QubitLevels:
    """Lowest three levels of the qubit well by exact 1D diagonalization.

    The Hamiltonian is ``-4*Ec*d^2/ddelta^2 + U(delta)`` with
    ``Ec = e^2/(2*Cq)``, discretized with a second-order finite-difference
    Laplacian on a uniform grid over the single well, hard walls at the
    enclosing barrier saddles (or, where a side is unbounded, far enough up
    the confining parabola not to perturb the bound levels).

    Raises WellTooShallow when fewer than three levels fit below the
    barrier top.
    """
    if n_grid < 512:
        raise ValueError("n_grid must be at least 512")
    _check_branch(params, phi, branch, "qubit")
    beta = params.beta_qubit_total
    scale = (PHI0 / (2.0 * math.pi)) ** 2 / params.loop_inductance_qubit
    ec = ECHARGE**2 / (2.0 * params.shunt_capacitance_qubit)
    delta0 = branch.junction_phase

    curvature = scale * (1.0 + beta * math.cos(delta0))
    omega_p = math.sqrt(8.0 * ec * curvature) / HBAR
    cap_reduced = 40.0 * HBAR * omega_p / scale

    left, right, barrier_top_red, u0_red = _well_walls(beta, phi, delta0, cap_reduced)

    grid = np.linspace(left, right, n_grid)
    dx = grid[1] - grid[0]
    u = scale * reduced_potential(grid, phi, beta)
    kin = 4.0 * ec / dx**2
    diag = 2.0 * kin + u
    off = np.full(n_grid - 1, -kin)
    evals = eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, 5))

    barrier_top = scale * barrier_top_red
    bound = [ev for ev in evals if ev < barrier_top]
    if len(bound) < 3:
        raise WellTooShallow(
            f"only {len(bound)} level(s) bound below the barrier at phi={phi:.4f} "
            "(well too close to the step edge)"
        )

    e0, e1, e2 = evals[0], evals[1], evals[2]
    f01 = (e1 - e0) / HPLANCK
    f12 = (e2 - e1) / HPLANCK
    alpha = 2.0 * math.pi * (f12 - f01)
    return QubitLevels(
        e0=float(e0),
        e1=float(e1),
        e2=float(e2),
        f01=float(f01),
        f12=float(f12),
        anharmonicity=float(alpha),
        relative_anharmonicity=float((f12 - f01) / f01),
    )


def anharmonicity_perturbative(
    params: CircuitParams, phi: float, branch: SquidBranch
) -> float:
    """Anharmonicity (rad/s) from second-order perturbation theory.

    Expands the well to quartic order around its minimum: the quartic term
    contributes in first order and the cubic term in second order. Defined
    for any stable branch, including wells too shallow to diagonalize;
    serves as the cross-check for :func:`qubit_levels`.
    """
    _check_branch(params, phi, branch, "qubit")
    beta = params.beta_qubit_total
    scale = (PHI0 / (2.0 * math.pi)) ** 2 / params.loop_inductance_qubit
    ec = ECHARGE**2 / (2.0 * params.shunt_capacitance_qubit)
    d0 = branch.junction_phase

    u2 = scale * (1.0 + beta * math.cos(d0))
    u3 = -scale * beta * math.sin(d0)
    u4 = -scale * beta * math.cos(d0)
    hw = math.sqrt(8.0 * ec * u2)
    dz2 = 4.0 * ec / hw  # phase zero-point spread squared

    lam3 = u3 * dz2**1.5 / 6.0
    lam4 = u4 * dz2**2 / 24.0
    alpha_energy = 12.0 * lam4 - 60.0 * lam3**2 / hw
    return alpha_energy / HBAR


# --- band helpers and bias inversion -----------------------------------------


def cavity_band(params: CircuitParams) -> tuple[float, float]:
    """(f_min, f_max) of the tunable cavity in Hz (junction phase 0 and pi)."""
    ratio = params.series_inductance / params.loop_inductance_cavity
    f = []
    for delta in (math.pi, 0.0):
        y = 1.0 + params.beta_cavity * math.cos(delta)
        f.append(
            params.omega_cavity_bare
            * math.sqrt(y)
            / math.sqrt(1.0 + y * ratio)
            / (2.0 * math.pi)
        )
    return f[0], f[1]


def cavity_bias_for_frequency(params: CircuitParams, f_target: float) -> float:
    """Flux (in [0, 0.5]) at which the cavity sits at ``f_target`` Hz."""
    f_min, f_max = cavity_band(params)
    if not (f_min <= f_target <= f_max):
        raise OutOfRange(
            f"target {f_target/1e9:.4f} GHz outside the cavity band "
            f"[{f_min/1e9:.4f}, {f_max/1e9:.4f}] GHz"
        )
    omega = 2.0 * math.pi * f_target
    ratio = params.series_inductance / params.loop_inductance_cavity
    w0sq = params.omega_cavity_bare**2
    y = omega**2 / (w0sq - omega**2 * ratio)
    c = (y - 1.0) / params.beta_cavity
    c = min(1.0, max(-1.0, c))
    delta = math.acos(c)
    return (params.beta_cavity * math.sin(delta) + delta) / (2.0 * math.pi)


def qubit_bias_for_frequency(params: CircuitParams, f_target: float) -> float:
    """Flux in [0, spinode) at which the plasma-frequency estimate hits target."""
    omega = 2.0 * math.pi * f_target
    r2 = (omega / params.omega_qubit_bare) ** 2
    btot = params.beta_qubit_total
    barm = params.beta_arm
    denom = btot - r2 * barm
    if denom <= 0:
        raise OutOfRange("target frequency unreachable for these parameters")
    c = (r2 - 1.0) / denom
    if not (-1.0 <= c <= 1.0):
        raise OutOfRange(
            f"target {f_target/1e9:.4f} GHz outside the qubit plasma band"
        )
    delta = math.acos(c)
    if 1.0 + btot * c <= 0.0:
        raise OutOfRange("target frequency lies beyond the stability spinode")
    return (btot * math.sin(delta) + delta) / (2.0 * math.pi)


# --- vectorized branch following (used by sweeps and fitters) -----------------


def branch_phase_grid(beta_eff: float, phis: np.ndarray, branch_id: int) -> np.ndarray:
    """Stable-branch junction phase for each flux; NaN where the branch is gone.

    Restricts the residual to the monotone stability interval around the
    requested winding and bisects, fully vectorized over bias points.
    """
    phis = np.asarray(phis, dtype=float)
    if beta_eff > 1.0:
        half = math.acos(-1.0 / beta_eff) - 1e-12
    else:
        half = math.pi + 0.5
    center = 2.0 * math.pi * branch_id
    lo = np.full_like(phis, center - half)
    hi = np.full_like(phis, center + half)
    rlo = quantization_residual(lo, 0.0, beta_eff) + 2.0 * math.pi * phis
    rhi = quantization_residual(hi, 0.0, beta_eff) + 2.0 * math.pi * phis
    exists = (rlo > 0.0) & (rhi < 0.0)
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        rm = 2.0 * math.pi * phis - beta_eff * np.sin(mid) - mid
        take_hi = rm > 0.0
        lo = np.where(take_hi, mid, lo)
        hi = np.where(take_hi, hi, mid)
    out = 0.5 * (lo + hi)
    # Newton polish: leaves the result a smooth function of the parameters,
    # which keeps finite-difference Jacobians of downstream fits clean
    for _ in range(3):
        r = 2.0 * math.pi * phis - beta_eff * np.sin(out) - out
        out = out + r / (1.0 + beta_eff * np.cos(out))
    return np.where(exists, out, np.nan)


def cavity_frequency_grid(params: CircuitParams, phis: np.ndarray) -> np.ndarray:
    """Cavity frequency (Hz) over a flux grid, following the single branch.

    Fluxes are reduced into the principal period first; valid for cavity
    screening parameters below 1 (single-valued response).
    """
    phis = np.asarray(phis, dtype=float)
    reduced = phis - np.round(phis)
    delta = branch_phase_grid(params.beta_cavity, reduced, 0)
    y = 1.0 + params.beta_cavity * np.cos(delta)
    ratio = params.series_inductance / params.loop_inductance_cavity
    return (
        params.omega_cavity_bare * np.sqrt(y) / np.sqrt(1.0 + y * ratio) / (2.0 * math.pi)
    )


def qubit_frequency_grid(
    params: CircuitParams, phis: np.ndarray, branch_id: int = 0
) -> np.ndarray:
    """Plasma-frequency estimate (Hz) along one qubit branch; NaN off-branch."""
    phis = np.asarray(phis, dtype=float)
    shifted = phis - branch_id
    delta = branch_phase_grid(params.beta_qubit_total, shifted, 0)
    c = np.cos(delta)
    num = 1.0 + params.beta_qubit_total * c
    den = 1.0 + params.beta_arm * c
    return params.omega_qubit_bare * np.sqrt(num / den) / (2.0 * math.pi)
