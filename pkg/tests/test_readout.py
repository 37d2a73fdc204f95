"""Line-shape model, tunneling-readout optimization, dispersive SNR."""

import math

import numpy as np
import pytest

from fluxcad.errors import EmptyGrid, SingleBranch
from fluxcad.params import PHI0
from fluxcad.readout import (
    ConstantDipModel,
    ResonatorLineShape,
    ReadoutChannel,
    TabulatedDipModel,
    cavity_response_time,
    dip_depth,
    dip_fwhm,
    dispersive_phase_signal,
    dispersive_snr,
    flux_state_cavity_shift,
    induced_cavity_flux_shift,
    loaded_q,
    optimize_tunneling_readout,
    transmission,
)
from fluxcad.squid import qubit_branches

TWO_PI = 2 * math.pi


def reference_line():
    return ResonatorLineShape(f0=6.741e9, q_internal=3444.0, q_external=309.0)


def test_loaded_q_quoted_values():
    assert loaded_q(3444.0, 309.0) == pytest.approx(284.0, abs=1.0)


def test_loaded_q_limits_and_symmetry():
    assert loaded_q(1e15, 309.0) == pytest.approx(309.0, rel=1e-9)
    q = 173.0
    assert loaded_q(2 * q, 2 * q) == pytest.approx(q, rel=1e-12)
    assert loaded_q(3444.0, 309.0) == loaded_q(309.0, 3444.0)
    assert loaded_q(3444.0, 309.0) <= min(3444.0, 309.0)


def test_transmission_dip_floor():
    line = reference_line()
    floor = abs(transmission(line, line.f0))
    assert floor == pytest.approx(1 - line.q_loaded / line.q_external, rel=1e-12)
    assert floor == pytest.approx(0.081, abs=0.002)


def test_transmission_off_resonance_near_unity():
    line = reference_line()
    for f in (line.f0 * 0.8, line.f0 * 1.2):
        assert abs(transmission(line, f)) > 0.99


def test_dip_width_matches_loaded_q():
    line = reference_line()
    width = dip_fwhm(line)
    assert abs(width - line.f0 / line.q_loaded) / (line.f0 / line.q_loaded) < 0.02
    assert dip_depth(line) == pytest.approx(line.q_loaded / line.q_external, rel=1e-12)


def test_transmission_skew_moves_phase_not_much_depth():
    skewed = ResonatorLineShape(6.741e9, 3444.0, 309.0, skew_angle=0.3)
    s = transmission(skewed, skewed.f0)
    assert abs(s.imag) > 0


def test_response_times():
    assert cavity_response_time(TWO_PI * 24e6) == pytest.approx(13.3e-9, abs=0.05e-9)
    assert 10e-9 <= cavity_response_time(TWO_PI * 24e6) <= 14e-9
    assert cavity_response_time(TWO_PI * 10e6) == pytest.approx(31.8e-9, abs=0.05e-9)
    assert cavity_response_time(2 * TWO_PI * 24e6) == pytest.approx(
        cavity_response_time(TWO_PI * 24e6) / 2, rel=1e-12
    )


# --- flux-state cavity shift ----------------------------------------------------


def test_shift_vanishes_at_sweet_spot(params_a):
    pair = [b for b in qubit_branches(params_a, 0.5) if b.stable]
    shift0 = flux_state_cavity_shift(params_a, 0.0, pair)
    shift_mid = flux_state_cavity_shift(params_a, 0.25, pair)
    assert shift0 < 1e-6 * shift_mid


def test_shift_grows_away_from_sweet_spot(params_a):
    pair = [b for b in qubit_branches(params_a, 0.5) if b.stable]
    assert flux_state_cavity_shift(params_a, 0.25, pair) > flux_state_cavity_shift(
        params_a, 0.05, pair
    )


def test_induced_shift_symmetric_pair(params_a):
    pair = [b for b in qubit_branches(params_a, 0.5) if b.stable]
    dphi = induced_cavity_flux_shift(params_a, pair)
    ic = params_a.qubit_junction.critical_current
    expected = params_a.shared_mutual * 2 * ic * math.sin(pair[0].junction_phase) / PHI0
    assert dphi == pytest.approx(expected, rel=1e-12)


def test_single_branch_rejected(params_a):
    only = [b for b in qubit_branches(params_a, 0.0) if b.stable]
    with pytest.raises(SingleBranch):
        flux_state_cavity_shift(params_a, 0.2, only)


# --- tunneling-readout optimizer -------------------------------------------------


def default_model():
    return ConstantDipModel.from_lineshape(reference_line())


def test_optimizer_rejects_empty_grid(params_a):
    with pytest.raises(EmptyGrid):
        optimize_tunneling_readout(params_a, default_model(), [])


def test_optimizer_flags_flat_curve(params_a):
    result = optimize_tunneling_readout(params_a, default_model(), [0.0])
    assert result.no_optimum
    assert result.best.figure_of_merit == 0.0


def test_optimum_never_at_sweet_spot(params_a):
    grid = np.linspace(0.0, 0.45, 61)
    result = optimize_tunneling_readout(params_a, default_model(), grid)
    assert not result.no_optimum
    assert result.best.phi_c != 0.0
    assert result.best.figure_of_merit > 0


def test_optimum_stable_under_grid_refinement(params_a):
    coarse = np.linspace(0.05, 0.45, 101)
    fine = np.linspace(0.05, 0.45, 1001)
    best_coarse = optimize_tunneling_readout(params_a, default_model(), coarse).best.phi_c
    best_fine = optimize_tunneling_readout(params_a, default_model(), fine).best.phi_c
    assert abs(best_coarse - best_fine) <= coarse[1] - coarse[0]


def test_argmax_invariant_under_depth_rescaling(params_a):
    grid = np.linspace(0.02, 0.48, 201)
    base = default_model()
    scaled = ConstantDipModel(depth=7.3 * base.depth, width_hz=base.width_hz)
    a = optimize_tunneling_readout(params_a, base, grid).best.phi_c
    b = optimize_tunneling_readout(params_a, scaled, grid).best.phi_c
    assert a == b


def test_tabulated_dip_model_interpolates(tmp_path, params_a):
    path = tmp_path / "dips.csv"
    path.write_text(
        "phi_c,depth_linear,width_Hz\n0.0,0.9,2.0e7\n0.5,0.5,4.0e7\n"
    )
    model = TabulatedDipModel.from_csv(path)
    depth, width = model(0.25)
    assert depth == pytest.approx(0.7)
    assert width == pytest.approx(3.0e7)
    result = optimize_tunneling_readout(params_a, model, np.linspace(0.05, 0.45, 51))
    assert result.best.figure_of_merit > 0


def test_separation_criterion(params_a):
    grid = np.linspace(0.05, 0.45, 101)
    result = optimize_tunneling_readout(params_a, default_model(), grid)
    p = result.best
    assert p.separation == abs(p.f_dip_state0 - p.f_dip_state1)
    assert p.well_separated == (p.separation > p.dip_width)


# --- dispersive SNR ---------------------------------------------------------------


def test_snr_arithmetic():
    channel = ReadoutChannel(kappa=TWO_PI * 24e6, noise_photons=0.0, drive_photons=10.0)
    snr = dispersive_snr(channel, 1.0e-6)
    assert snr == pytest.approx(2 * 10 * TWO_PI * 24e6 * 1e-6, rel=1e-12)
    assert snr == pytest.approx(3016.0, rel=0.001)


def test_snr_zero_drive():
    channel = ReadoutChannel(kappa=TWO_PI * 24e6, drive_photons=0.0)
    assert dispersive_snr(channel, 1e-6) == 0.0


def test_snr_efficiency_halves_with_one_noise_photon():
    quiet = ReadoutChannel(kappa=TWO_PI * 24e6, noise_photons=0.0, drive_photons=5.0)
    noisy = ReadoutChannel(kappa=TWO_PI * 24e6, noise_photons=1.0, drive_photons=5.0)
    assert dispersive_snr(noisy, 1e-6) == pytest.approx(dispersive_snr(quiet, 1e-6) / 2)


def test_snr_linear_in_each_factor():
    rng = np.random.default_rng(2)
    base = ReadoutChannel(kappa=TWO_PI * 20e6, noise_photons=0.5, drive_photons=4.0)
    t1 = 0.7e-6
    s0 = dispersive_snr(base, t1)
    for _ in range(5):
        k = rng.uniform(0.5, 3.0)
        assert dispersive_snr(
            ReadoutChannel(base.kappa * k, base.noise_photons, base.bandwidth, base.drive_photons),
            t1,
        ) == pytest.approx(k * s0, rel=1e-12)
        assert dispersive_snr(base, k * t1) == pytest.approx(k * s0, rel=1e-12)


def test_bandwidth_flag():
    assert ReadoutChannel(kappa=TWO_PI * 24e6, bandwidth=TWO_PI * 30e6).bandwidth_adequate
    assert not ReadoutChannel(kappa=TWO_PI * 24e6, bandwidth=TWO_PI * 20e6).bandwidth_adequate


def test_phase_signal_values():
    kappa = TWO_PI * 24e6
    assert dispersive_phase_signal(0.0, kappa) == 0.0
    assert dispersive_phase_signal(kappa / 2, kappa) == pytest.approx(math.pi / 4, rel=1e-12)
    chi = TWO_PI * 2.5e6  # 2*chi = 5 MHz
    assert dispersive_phase_signal(chi, kappa) == pytest.approx(math.atan(5 / 24), rel=1e-12)
    assert dispersive_phase_signal(chi, kappa) == pytest.approx(0.205, abs=5e-4)
