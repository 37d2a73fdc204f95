"""fluxcad: design and analysis of tunable-cavity QED circuits.

Two inductively coupled rf SQUIDs form a flux-tunable readout cavity and a
phase qubit; this package computes their flux-dependent spectra, coupling,
dispersive shifts, loss budgets, and readout figures of merit, fits circuit
parameters from spectroscopy, and evaluates static versus dynamic
cavity-flux operation schedules.
"""

from .coupling import (
    CouplingPoint,
    DispersiveShift,
    capacitive_coupling_comparison,
    critical_photon_number,
    dispersive_shift,
    inductive_coupling,
    normal_mode_frequencies,
)
from .errors import FluxcadError
from .fitting import (
    FitProblem,
    FitResult,
    FluxCalibration,
    SpectroscopySweep,
    calibrate_flux_axis,
    fit_lineshape,
    fit_spectrum,
    synthesize_sweep,
)
from .loss import (
    CavitySetting,
    DecayChannel,
    LossBudget,
    bias_line_rate,
    combined_budget,
    dielectric_rate,
    purcell_rate,
    t1_spectrum,
)
from .params import PHI0, CircuitParams, JunctionParams
from .presets import DesignPreset, design_preset
from .readout import (
    ReadoutChannel,
    ResonatorLineShape,
    cavity_response_time,
    dispersive_phase_signal,
    dispersive_snr,
    flux_state_cavity_shift,
    loaded_q,
    optimize_tunneling_readout,
    transmission,
)
from .schedule import (
    FluxSchedule,
    FluxSegment,
    ScheduleReport,
    compare_static_dynamic,
    evaluate_schedule,
)
from .squid import (
    PotentialProfile,
    QubitLevels,
    SquidBranch,
    anharmonicity_perturbative,
    cavity_band,
    cavity_branches,
    cavity_frequency,
    circulating_current,
    potential_profile,
    qubit_branches,
    qubit_levels,
    qubit_plasma_frequency,
    solve_flux_quantization,
)

__version__ = "0.1.0"
