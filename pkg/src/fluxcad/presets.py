"""Shipped design presets (circuit values plus measured operating points)."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import yaml

from .config import circuit_from_dict
from .errors import ConfigError
from .params import CircuitParams


@dataclass(frozen=True)
class OperatingPoint:
    """One measured readout setting: cavity frequency, splitting, linewidth."""

    fc_GHz: float
    two_g_MHz: float
    kappa_MHz: float


@dataclass(frozen=True)
class DesignPreset:
    name: str
    params: CircuitParams
    operating_points: tuple[OperatingPoint, ...]

    def operating_point(self, fc_GHz: float) -> OperatingPoint:
        for point in self.operating_points:
            if abs(point.fc_GHz - fc_GHz) < 1e-9:
                return point
        raise KeyError(f"design {self.name} has no operating point at {fc_GHz} GHz")


def preset_names() -> tuple[str, ...]:
    return ("A", "B")


def design_preset(name: str) -> DesignPreset:
    """Load a shipped preset ('A' or 'B')."""
    key = name.strip().upper().removeprefix("DESIGN")
    if key not in preset_names():
        raise ConfigError(f"unknown design {name!r}; available: A, B")
    text = resources.files("fluxcad.data").joinpath(f"design{key}.yaml").read_text()
    doc = yaml.safe_load(text)
    points = tuple(
        OperatingPoint(
            fc_GHz=float(row["fc_GHz"]),
            two_g_MHz=float(row["two_g_MHz"]),
            kappa_MHz=float(row["kappa_MHz"]),
        )
        for row in doc["operating_points"]
    )
    return DesignPreset(
        name=doc["name"],
        params=circuit_from_dict(doc["circuit"]),
        operating_points=points,
    )
