"""Config round-trips, preset loading, and transcription checks."""

import math

import pytest
import yaml

from fluxcad.config import (
    circuit_from_dict,
    circuit_to_dict,
    dump_circuit,
    load_config,
)
from fluxcad.errors import ConfigError
from fluxcad.params import CircuitParams, JunctionParams
from fluxcad.presets import design_preset, preset_names

# measured operating points the presets must carry verbatim
OPERATING_POINTS = {
    "A": [(6.78, 78.0, 24.0), (6.58, 104.0, 22.0), (4.90, 316.0, 24.0)],
    "B": [(6.97, 113.0, 10.0), (6.31, 182.0, 10.0), (6.00, 207.0, 14.0)],
}


def test_preset_names():
    assert preset_names() == ("A", "B")
    with pytest.raises(ConfigError):
        design_preset("C")


@pytest.mark.parametrize("name", ["A", "B"])
def test_operating_points_transcription(name):
    preset = design_preset(name)
    rows = [(p.fc_GHz, p.two_g_MHz, p.kappa_MHz) for p in preset.operating_points]
    assert rows == OPERATING_POINTS[name]


def test_preset_lookup(design_a):
    point = design_a.operating_point(6.58)
    assert point.two_g_MHz == 104.0
    with pytest.raises(KeyError):
        design_a.operating_point(5.55)


def test_design_a_fitted_values(params_a):
    assert params_a.loop_inductance_cavity == pytest.approx(0.75e-9)
    assert params_a.series_inductance == pytest.approx(1.79e-9)
    assert params_a.cavity_junction.critical_current == pytest.approx(0.31e-6)
    assert params_a.shunt_capacitance_cavity == pytest.approx(0.25e-12)
    assert params_a.loop_inductance_qubit == pytest.approx(2.5e-9)
    assert params_a.junction_arm_inductance == pytest.approx(0.272e-9)
    assert params_a.qubit_junction.critical_current == pytest.approx(0.33e-6)
    assert params_a.shunt_capacitance_qubit == pytest.approx(0.39e-12)
    assert params_a.shared_mutual == pytest.approx(61e-12)
    assert params_a.bias_mutual_cavity == pytest.approx(1.7e-12)
    assert params_a.bias_mutual_qubit == pytest.approx(10.9e-12)
    assert params_a.feedline_impedance == 50.0
    # screening ratios close to the design targets (0.7 and 2.8)
    assert params_a.beta_cavity == pytest.approx(0.7, abs=0.05)
    assert params_a.beta_qubit == pytest.approx(2.8, abs=0.35)


def test_roundtrip_dict(params_a):
    rebuilt = circuit_from_dict(circuit_to_dict(params_a))
    assert rebuilt == params_a


def test_dump_and_reload(tmp_path, params_b):
    path = tmp_path / "circuit.yaml"
    path.write_text(dump_circuit(params_b, name="B"))
    doc = load_config(path)
    assert doc["name"] == "B"
    assert circuit_from_dict(doc["circuit"]) == params_b


def test_missing_field_diagnostic():
    section = circuit_to_dict(design_preset("A").params)
    del section["series_inductance_nH"]
    with pytest.raises(ConfigError, match="circuit.series_inductance_nH"):
        circuit_from_dict(section)


def test_non_numeric_field_diagnostic():
    section = circuit_to_dict(design_preset("A").params)
    section["shared_mutual_pH"] = "sixty-one"
    with pytest.raises(ConfigError, match="shared_mutual_pH"):
        circuit_from_dict(section)


def test_invariant_violation_reported():
    section = circuit_to_dict(design_preset("A").params)
    section["shared_mutual_pH"] = 5000.0  # exceeds the cavity loop inductance
    with pytest.raises(ConfigError, match="mutual"):
        circuit_from_dict(section)


def test_bad_yaml_rejected(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("circuit: [unbalanced")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")


def test_params_validation():
    junction = JunctionParams(0.3e-6)
    with pytest.raises(ValueError):
        JunctionParams(-1e-6)
    with pytest.raises(ValueError):
        CircuitParams(
            loop_inductance_cavity=-1e-9,
            loop_inductance_qubit=2.5e-9,
            series_inductance=1.79e-9,
            junction_arm_inductance=0.27e-9,
            shared_mutual=61e-12,
            shunt_capacitance_cavity=0.25e-12,
            shunt_capacitance_qubit=0.39e-12,
            cavity_junction=junction,
            qubit_junction=junction,
            bias_mutual_cavity=1.7e-12,
            bias_mutual_qubit=10.9e-12,
        )


def test_design_b_band_targets(params_b):
    # reconstruction targets: cavity maximum ~7.07 GHz, bias-line lifetime 18.5 us
    from fluxcad.loss import bias_line_rate
    from fluxcad.squid import cavity_band

    _, f_max = cavity_band(params_b)
    assert f_max == pytest.approx(7.07e9, rel=0.005)
    assert 1.0 / bias_line_rate(params_b).rate == pytest.approx(18.5e-6, rel=0.01)


def test_beta_derivations(params_a):
    lj = params_a.qubit_junction.inductance
    assert params_a.beta_qubit_total == pytest.approx(
        params_a.loop_inductance_qubit / lj + params_a.junction_arm_inductance / lj
    )
    assert math.isfinite(params_a.omega_series)
