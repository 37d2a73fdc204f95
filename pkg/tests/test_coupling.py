"""Coupling strength versus cavity frequency, and dispersive shifts."""

import math

import numpy as np
import pytest

from fluxcad.coupling import (
    bare_coupling,
    capacitive_coupling_comparison,
    cavity_tunable_range,
    critical_photon_number,
    dispersive_shift,
    inductive_coupling,
    normal_mode_frequencies,
)
from fluxcad.errors import OutOfRange, StraddlingBoundary, ZeroDetuning

TWO_PI = 2 * math.pi
MHZ = 1e6


def two_g_mhz(params, fc_ghz):
    point = inductive_coupling(params, TWO_PI * fc_ghz * 1e9)
    return 2 * point.coupling / TWO_PI / MHZ


@pytest.mark.parametrize("fc_ghz,measured_mhz", [(6.78, 78.0), (6.58, 104.0), (4.90, 316.0)])
def test_design_a_coupling_matches_measured(params_a, fc_ghz, measured_mhz):
    value = two_g_mhz(params_a, fc_ghz)
    assert abs(value - measured_mhz) / measured_mhz < 0.10


def test_series_resonance_above_band_keeps_g_positive(params_a):
    w_lo, w_hi = cavity_tunable_range(params_a)
    assert params_a.omega_series > w_hi  # the g = 0 root sits above the band
    for wc in np.linspace(w_lo, w_hi, 50):
        assert inductive_coupling(params_a, float(wc)).coupling > 0


def test_inductive_coupling_monotone_decreasing(params_a):
    w_lo, w_hi = cavity_tunable_range(params_a)
    g = [inductive_coupling(params_a, float(w)).coupling for w in np.linspace(w_lo, w_hi, 80)]
    assert np.all(np.diff(g) < 0)


def test_out_of_band_rejected(params_a):
    with pytest.raises(OutOfRange):
        inductive_coupling(params_a, TWO_PI * 8.0e9)
    with pytest.raises(OutOfRange):
        inductive_coupling(params_a, TWO_PI * 4.0e9)


def test_capacitive_comparison_values():
    assert capacitive_coupling_comparison(0.0, 0.39e-12, 0.25e-12, TWO_PI * 6e9).coupling == 0.0
    point = capacitive_coupling_comparison(15e-15, 0.39e-12, 0.25e-12, TWO_PI * 6e9)
    expected_mhz = 6e9 * 15.0 / (2 * math.sqrt(390.0 * 250.0)) / MHZ  # = 144.1
    assert point.coupling / TWO_PI / MHZ == pytest.approx(expected_mhz, rel=1e-12)
    double = capacitive_coupling_comparison(30e-15, 0.39e-12, 0.25e-12, TWO_PI * 6e9)
    assert double.coupling == pytest.approx(2 * point.coupling, rel=1e-12)


def test_capacitive_increases_with_frequency():
    g = [
        capacitive_coupling_comparison(15e-15, 0.39e-12, 0.25e-12, TWO_PI * f).coupling
        for f in np.linspace(4.5e9, 7e9, 20)
    ]
    assert np.all(np.diff(g) > 0)


# --- dispersive shift ----------------------------------------------------------


def test_two_level_limit_of_three_level_model():
    g, delta = TWO_PI * 50e6, TWO_PI * 500e6
    three = dispersive_shift(g, delta, alpha=-math.inf, model="three_level")
    two = dispersive_shift(g, delta, model="two_level")
    assert three.chi == pytest.approx(two.chi, rel=1e-12)
    assert two.chi == pytest.approx(g * g / delta, rel=1e-12)


def test_three_level_shift_inside_straddling_flips_sign():
    g = TWO_PI * 50e6
    delta = TWO_PI * 500e6
    alpha = -TWO_PI * 100e6
    shift = dispersive_shift(g, delta, alpha, "three_level")
    # (2500/500) / (1 - 5) = -1.25 MHz
    assert shift.chi / TWO_PI / MHZ == pytest.approx((2500.0 / 500.0) / (1.0 - 5.0), rel=1e-12)
    assert shift.full_shift == pytest.approx(2 * shift.chi)


def test_antisymmetry_under_joint_sign_flip():
    rng = np.random.default_rng(11)
    for _ in range(25):
        g = TWO_PI * rng.uniform(10e6, 200e6)
        delta = TWO_PI * rng.uniform(-2e9, 2e9)
        alpha = -TWO_PI * rng.uniform(20e6, 500e6)
        if delta == 0 or 1 + delta / alpha == 0:
            continue
        a = dispersive_shift(g, delta, alpha, "three_level").chi
        b = dispersive_shift(g, -delta, -alpha, "three_level").chi
        assert b == pytest.approx(-a, rel=1e-12)


def test_three_level_smaller_than_two_level_outside_straddling():
    # sampled with the detuning at least twice the anharmonicity, the regime
    # the measured curves cover
    rng = np.random.default_rng(5)
    for _ in range(50):
        alpha = -TWO_PI * rng.uniform(30e6, 300e6)
        ratio = rng.uniform(2.2, 40.0)
        delta = abs(alpha) * ratio  # delta/alpha < 0
        g = TWO_PI * rng.uniform(10e6, 100e6)
        three = dispersive_shift(g, delta, alpha, "three_level")
        two = dispersive_shift(g, delta, model="two_level")
        assert abs(three.chi) < abs(two.chi)


def test_models_agree_for_huge_anharmonicity():
    g, delta = TWO_PI * 40e6, TWO_PI * 300e6
    alpha = -delta / 0.009  # |delta/alpha| < 0.01
    three = dispersive_shift(g, delta, alpha, "three_level")
    two = dispersive_shift(g, delta, model="two_level")
    assert abs(three.chi - two.chi) / abs(two.chi) < 0.01


def test_dispersive_shift_errors_and_flags():
    g = TWO_PI * 50e6
    with pytest.raises(ZeroDetuning):
        dispersive_shift(g, 0.0, -TWO_PI * 100e6)
    with pytest.raises(StraddlingBoundary):
        dispersive_shift(g, TWO_PI * 100e6, -TWO_PI * 100e6)
    ok = dispersive_shift(g, 10 * g, -TWO_PI * 100e6)
    assert ok.dispersive_ok
    marginal = dispersive_shift(g, 3 * g, -TWO_PI * 100e6)
    assert not marginal.dispersive_ok


# --- critical photon number ----------------------------------------------------


def test_critical_photon_number_arithmetic():
    g = TWO_PI * 30e6
    assert critical_photon_number(g, 10 * g) == pytest.approx(25.0, rel=1e-12)
    assert critical_photon_number(g, 2 * g) == pytest.approx(1.0, rel=1e-12)
    assert critical_photon_number(g, 0.0) == 0.0
    with pytest.raises(ValueError):
        critical_photon_number(0.0, TWO_PI * 1e9)


# --- normal modes ---------------------------------------------------------------


def test_split_on_resonance_is_twice_g():
    w = TWO_PI * 6.5e9
    g = TWO_PI * 52e6
    lo, hi = normal_mode_frequencies(w, w, g)
    assert hi - lo == pytest.approx(2 * g, rel=1e-14)


def test_half_splitting_recovers_model_coupling(params_a):
    # resonance condition with the coupling model's own g returns it exactly
    wc = TWO_PI * 6.58e9
    g = inductive_coupling(params_a, wc).coupling
    lo, hi = normal_mode_frequencies(wc, wc, g)
    assert 0.5 * (hi - lo) == pytest.approx(g, rel=1e-14)


def test_design_b_resonant_splitting():
    # measured design-B splitting at its maximum cavity frequency
    w = TWO_PI * 7.07e9
    g = TWO_PI * 52e6  # 2g = 104 MHz
    lo, hi = normal_mode_frequencies(w, w, g)
    assert (hi - lo) / TWO_PI / MHZ == pytest.approx(104.0, rel=1e-12)


def test_far_detuned_mode_asymptote():
    wq, wc = TWO_PI * 8.0e9, TWO_PI * 6.0e9
    g = TWO_PI * 40e6
    lo, hi = normal_mode_frequencies(wq, wc, g)
    delta = wq - wc
    assert hi == pytest.approx(wq + g * g / delta, rel=1e-6)
    assert lo == pytest.approx(wc - g * g / delta, rel=1e-6)


def test_weak_coupling_flag(params_a):
    w_lo, _ = cavity_tunable_range(params_a)
    assert inductive_coupling(params_a, w_lo).weak_coupling_ok  # g/wc ~ 3e-2
    g0 = bare_coupling(params_a)
    assert g0 > 0
