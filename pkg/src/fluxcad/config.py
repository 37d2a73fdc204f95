"""Structured config I/O at the CLI unit boundary.

Config files are YAML. Circuit values use reporting units (nH, pH, pF, fF,
uA, ohms); everything becomes SI on load. Parse failures raise ConfigError
with the offending field path.
"""

from __future__ import annotations

import math
from typing import Any

import yaml

from .errors import ConfigError
from .params import CircuitParams, JunctionParams

_NANO = 1e-9
_PICO = 1e-12
_FEMTO = 1e-15
_MICRO = 1e-6

_CIRCUIT_FIELDS = {
    # yaml key -> (CircuitParams field, scale to SI)
    "loop_inductance_cavity_nH": ("loop_inductance_cavity", _NANO),
    "loop_inductance_qubit_nH": ("loop_inductance_qubit", _NANO),
    "series_inductance_nH": ("series_inductance", _NANO),
    "junction_arm_inductance_nH": ("junction_arm_inductance", _NANO),
    "shared_mutual_pH": ("shared_mutual", _PICO),
    "shunt_capacitance_cavity_pF": ("shunt_capacitance_cavity", _PICO),
    "shunt_capacitance_qubit_pF": ("shunt_capacitance_qubit", _PICO),
    "bias_mutual_cavity_pH": ("bias_mutual_cavity", _PICO),
    "bias_mutual_qubit_pH": ("bias_mutual_qubit", _PICO),
    "feedline_impedance_ohm": ("feedline_impedance", 1.0),
}


def _require_number(section: dict, key: str, where: str) -> float:
    if key not in section:
        raise ConfigError(f"missing field '{where}.{key}'")
    value = section[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise ConfigError(f"field '{where}.{key}' must be a finite number, got {value!r}")
    return float(value)


def _junction_from_dict(section: Any, where: str) -> JunctionParams:
    if not isinstance(section, dict):
        raise ConfigError(f"section '{where}' must be a mapping")
    return JunctionParams(
        critical_current=_require_number(section, "critical_current_uA", where) * _MICRO,
        self_capacitance=_require_number(section, "self_capacitance_fF", where) * _FEMTO,
    )


def circuit_from_dict(section: Any, where: str = "circuit") -> CircuitParams:
    if not isinstance(section, dict):
        raise ConfigError(f"section '{where}' must be a mapping")
    kwargs = {}
    for key, (fieldname, scale) in _CIRCUIT_FIELDS.items():
        kwargs[fieldname] = _require_number(section, key, where) * scale
    kwargs["cavity_junction"] = _junction_from_dict(
        section.get("cavity_junction"), f"{where}.cavity_junction"
    )
    kwargs["qubit_junction"] = _junction_from_dict(
        section.get("qubit_junction"), f"{where}.qubit_junction"
    )
    try:
        return CircuitParams(**kwargs)
    except ValueError as err:
        raise ConfigError(f"invalid circuit parameters in '{where}': {err}") from err


def circuit_to_dict(params: CircuitParams) -> dict:
    out = {}
    for key, (fieldname, scale) in _CIRCUIT_FIELDS.items():
        out[key] = getattr(params, fieldname) / scale
    out["cavity_junction"] = {
        "critical_current_uA": params.cavity_junction.critical_current / _MICRO,
        "self_capacitance_fF": params.cavity_junction.self_capacitance / _FEMTO,
    }
    out["qubit_junction"] = {
        "critical_current_uA": params.qubit_junction.critical_current / _MICRO,
        "self_capacitance_fF": params.qubit_junction.self_capacitance / _FEMTO,
    }
    return out


def load_config(path) -> dict:
    """Read a YAML config file into a dict, with parse diagnostics."""
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except FileNotFoundError as err:
        raise ConfigError(f"config file not found: {path}") from err
    except yaml.YAMLError as err:
        raise ConfigError(f"cannot parse config {path}: {err}") from err
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must contain a top-level mapping")
    return data


def circuit_from_config(path) -> CircuitParams:
    data = load_config(path)
    if "circuit" not in data:
        raise ConfigError(f"config {path} has no 'circuit' section")
    return circuit_from_dict(data["circuit"])


def dump_circuit(params: CircuitParams, name: str | None = None) -> str:
    doc = {} if name is None else {"name": name}
    doc["circuit"] = circuit_to_dict(params)
    return yaml.safe_dump(doc, sort_keys=False)
