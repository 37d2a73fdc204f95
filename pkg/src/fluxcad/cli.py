"""Command-line front end.

Every command takes either ``--design A|B`` (shipped presets) or
``--config PATH`` (YAML with a ``circuit`` section), writes machine-readable
CSV/JSON, and drops a run manifest next to each output file. Exit codes:
0 success, 2 config error, 3 numeric failure, 4 model-domain error.
``FLUXCAD_THREADS`` caps sweep parallelism (default 1).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np

from . import coupling as cpl
from . import loss, readout, schedule as sched, squid
from .config import (
    circuit_from_config,
    circuit_from_dict,
    circuit_to_dict,
    dump_circuit,
    load_config,
)
from .errors import ConfigError, DomainError, FluxcadError, NumericError
from .fitting import (
    FitProblem,
    SpectroscopySweep,
    calibrate_flux_axis,
    fit_lineshape,
    fit_spectrum,
)
from .params import CircuitParams
from .presets import design_preset

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_DOMAIN = 4

GHZ = 1e9
MHZ = 1e6
TWO_PI = 2.0 * math.pi

# CLI unit per fit parameter name (multiply CLI value by this to get SI)
_FREE_PARAM_SCALE = {
    "cavity_critical_current": 1e-6,
    "qubit_critical_current": 1e-6,
    "shunt_capacitance_cavity": 1e-12,
    "shunt_capacitance_qubit": 1e-12,
    "series_inductance": 1e-9,
    "junction_arm_inductance": 1e-9,
    "loop_inductance_cavity": 1e-9,
    "loop_inductance_qubit": 1e-9,
    "flux_offset": 1.0,
    "flux_period": 1.0,
}


def t_prime(t1: float, t2: float) -> float:
    """On-resonance driven-decay time (1/(2*T1) + 1/(2*T2))^-1."""
    if t1 <= 0 or t2 <= 0:
        raise ValueError("T1 and T2 must be positive")
    return 1.0 / (0.5 / t1 + 0.5 / t2)


def exit_code_for(err: Exception) -> int:
    if isinstance(err, ConfigError):
        return EXIT_CONFIG
    if isinstance(err, NumericError):
        return EXIT_NUMERIC
    if isinstance(err, DomainError):
        return EXIT_DOMAIN
    return 1


def _fail(err: FluxcadError):
    click.echo(f"error: {err}", err=True)
    sys.exit(exit_code_for(err))


def max_workers() -> int:
    raw = os.environ.get("FLUXCAD_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _parallel_map(fn, items):
    workers = max_workers()
    items = list(items)
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --- output plumbing ----------------------------------------------------------


@dataclass
class RunManifest:
    command: str
    config_hash: str
    outputs: list[str]
    timestamp: str


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".fluxcad-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def _render_table(header, rows, fmt: str) -> str:
    if fmt == "json":
        payload = [dict(zip(header, row)) for row in rows]
        return json.dumps(payload, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _write_output(path, header, rows, fmt, command, payload):
    path = Path(path)
    _atomic_write(path, _render_table(header, rows, fmt))
    _write_manifest(path, command, payload)


def _config_hash(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _write_manifest(out_path: Path, command: str, payload: dict):
    manifest = RunManifest(
        command=command,
        config_hash=_config_hash(payload),
        outputs=[str(out_path)],
        timestamp=datetime.now(timezone.utc).isoformat(),
    )
    _atomic_write(out_path.with_suffix(out_path.suffix + ".manifest.json"),
                  json.dumps(asdict(manifest), indent=1) + "\n")


def _resolve_params(design, config) -> tuple[CircuitParams, dict]:
    if (design is None) == (config is None):
        raise ConfigError("provide exactly one of --design or --config")
    if design is not None:
        params = design_preset(design).params
    else:
        params = circuit_from_config(config)
    return params, circuit_to_dict(params)


# --- CLI group ----------------------------------------------------------------


@click.group()
def main():
    """Tunable-cavity circuit design and analysis tools."""


def _design_options(fn):
    fn = click.option("--design", type=click.Choice(["A", "B"]), default=None,
                      help="Shipped design preset.")(fn)
    fn = click.option("--config", "config_path", type=click.Path(), default=None,
                      help="YAML config with a 'circuit' section.")(fn)
    return fn


_format_option = click.option(
    "--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
    help="Output table format."
)


@main.command()
@_design_options
@click.option("--flavor", type=click.Choice(["cavity", "qubit"]), required=True)
@click.option("--phi-min", type=float, default=-1.0, show_default=True)
@click.option("--phi-max", type=float, default=1.0, show_default=True)
@click.option("--points", type=int, default=401, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@_format_option
def spectrum(design, config_path, flavor, phi_min, phi_max, points, out, fmt):
    """Frequency-versus-flux sweep, both branches in hysteretic regions."""
    try:
        params, pdict = _resolve_params(design, config_path)
        if points < 2:
            raise ConfigError("--points must be at least 2")
        phis = np.linspace(phi_min, phi_max, points)
        branches_of = squid.cavity_branches if flavor == "cavity" else squid.qubit_branches
        freq_of = (
            squid.cavity_frequency if flavor == "cavity" else squid.qubit_plasma_frequency
        )

        def one(phi):
            rows = []
            for branch in branches_of(params, float(phi)):
                if branch.stable:
                    rows.append(
                        (float(phi), branch.branch_id, freq_of(params, float(phi), branch) / GHZ)
                    )
            return rows

        rows = [r for chunk in _parallel_map(one, phis) for r in chunk]
        payload = {"command": "spectrum", "circuit": pdict, "flavor": flavor,
                   "phi_min": phi_min, "phi_max": phi_max, "points": points}
        _write_output(out, ["phi", "branch_id", "freq_GHz"], rows, fmt, "spectrum", payload)
        click.echo(f"wrote {len(rows)} rows to {out}")
    except FluxcadError as err:
        _fail(err)


@main.command()
@_design_options
@click.option("--fc-min-ghz", type=float, default=None, help="Default: band minimum.")
@click.option("--fc-max-ghz", type=float, default=None, help="Default: band maximum.")
@click.option("--points", type=int, default=201, show_default=True)
@click.option("--cap-ff", "cap_ff", type=float, multiple=True, default=(5.0, 15.0),
              show_default=True, help="Coupling capacitors for the comparison columns.")
@click.option("--out", type=click.Path(), required=True)
@_format_option
def couple(design, config_path, fc_min_ghz, fc_max_ghz, points, cap_ff, out, fmt):
    """Coupling rate versus cavity frequency (inductive + capacitive curves)."""
    try:
        params, pdict = _resolve_params(design, config_path)
        f_lo, f_hi = squid.cavity_band(params)
        lo = fc_min_ghz * GHZ if fc_min_ghz else f_lo
        hi = fc_max_ghz * GHZ if fc_max_ghz else f_hi
        freqs = np.linspace(lo, hi, points)
        header = ["fc_GHz", "two_g_inductive_MHz"] + [
            f"two_g_capacitive_{c:g}fF_MHz" for c in cap_ff
        ]
        rows = []
        for f in freqs:
            wc = TWO_PI * f
            point = cpl.inductive_coupling(params, wc)
            row = [f / GHZ, 2.0 * point.coupling / TWO_PI / MHZ]
            for c in cap_ff:
                gcap = cpl.capacitive_coupling_comparison(
                    c * 1e-15,
                    params.shunt_capacitance_qubit,
                    params.shunt_capacitance_cavity,
                    wc,
                ).coupling
                row.append(2.0 * gcap / TWO_PI / MHZ)
            rows.append(tuple(row))
        payload = {"command": "couple", "circuit": pdict, "fc_lo": lo, "fc_hi": hi,
                   "points": points, "cap_ff": list(cap_ff)}
        _write_output(out, header, rows, fmt, "couple", payload)
        click.echo(f"wrote {len(rows)} rows to {out}")
    except FluxcadError as err:
        _fail(err)


@main.command()
@_design_options
@click.option("--fc-ghz", type=float, required=True, help="Cavity setting frequency.")
@click.option("--kappa-mhz", type=float, default=None,
              help="Cavity linewidth; default from the preset operating point at --fc-ghz.")
@click.option("--two-g-mhz", type=float, default=None,
              help="Override the coupling 2g/2pi; default from the inductive model.")
@click.option("--f01-min-ghz", type=float, required=True)
@click.option("--f01-max-ghz", type=float, required=True)
@click.option("--points", type=int, default=201, show_default=True)
@click.option("--qd", type=float, default=82400.0, show_default=True,
              help="Dielectric quality factor.")
@click.option("--out", type=click.Path(), required=True)
@_format_option
def budget(design, config_path, fc_ghz, kappa_mhz, two_g_mhz, f01_min_ghz,
           f01_max_ghz, points, qd, out, fmt):
    """Qubit T1 budget versus qubit frequency at one cavity setting."""
    try:
        params, pdict = _resolve_params(design, config_path)
        if kappa_mhz is None:
            if design is None:
                raise ConfigError("--kappa-mhz is required with --config")
            try:
                kappa_mhz = design_preset(design).operating_point(fc_ghz).kappa_MHz
            except KeyError as err:
                raise ConfigError(
                    f"no preset operating point at {fc_ghz} GHz; pass --kappa-mhz"
                ) from err
        omega_c = TWO_PI * fc_ghz * GHZ
        if two_g_mhz is None:
            g = cpl.inductive_coupling(params, omega_c).coupling
        else:
            g = TWO_PI * two_g_mhz * MHZ / 2.0
        setting = loss.CavitySetting(omega_c=omega_c, kappa=TWO_PI * kappa_mhz * MHZ, g=g)
        grid = TWO_PI * np.linspace(f01_min_ghz, f01_max_ghz, points) * GHZ
        spectrum_points = loss.t1_spectrum(params, setting, grid, qd)
        rows = []
        for p in spectrum_points:
            f01_ghz = p.qubit_freq / TWO_PI / GHZ
            if p.in_gap:
                rows.append((f01_ghz, fc_ghz, None, None, None, None))
            else:
                rows.append(
                    (
                        f01_ghz,
                        fc_ghz,
                        p.budget.channel_rate("purcell"),
                        p.budget.channel_rate("bias_line"),
                        p.budget.channel_rate("dielectric"),
                        p.budget.t1_total * 1e6,
                    )
                )
        payload = {"command": "budget", "circuit": pdict, "fc_ghz": fc_ghz,
                   "kappa_mhz": kappa_mhz, "two_g_mhz": two_g_mhz,
                   "f01_range": [f01_min_ghz, f01_max_ghz], "points": points, "qd": qd}
        header = ["f01_GHz", "fc_GHz", "gamma_purcell", "gamma_bias",
                  "gamma_dielectric", "t1_us"]
        _write_output(out, header, rows, fmt, "budget", payload)
        click.echo(f"wrote {len(rows)} rows to {out}")
    except FluxcadError as err:
        _fail(err)


@main.command()
@_design_options
@click.option("--fc-ghz", type=float, required=True)
@click.option("--f01-min-ghz", type=float, required=True)
@click.option("--f01-max-ghz", type=float, required=True)
@click.option("--points", type=int, default=51, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@_format_option
def chi(design, config_path, fc_ghz, f01_min_ghz, f01_max_ghz, points, out, fmt):
    """Dispersive shift versus qubit frequency at a fixed cavity setting.

    The qubit anharmonicity at each point comes from exact diagonalization
    of the well at the bias reproducing that qubit frequency.
    """
    try:
        params, pdict = _resolve_params(design, config_path)
        omega_c = TWO_PI * fc_ghz * GHZ
        g = cpl.inductive_coupling(params, omega_c).coupling

        def one(f01_ghz):
            f01 = f01_ghz * GHZ
            phi_q = squid.qubit_bias_for_frequency(params, f01)
            branch = [
                b for b in squid.qubit_branches(params, phi_q) if b.stable and b.branch_id == 0
            ][0]
            levels = squid.qubit_levels(params, phi_q, branch)
            delta = TWO_PI * f01 - omega_c
            three = cpl.dispersive_shift(g, delta, levels.anharmonicity, "three_level")
            two = cpl.dispersive_shift(g, delta, model="two_level")
            return (
                f01_ghz,
                fc_ghz,
                delta / TWO_PI / MHZ,
                delta / (TWO_PI * f01),
                levels.anharmonicity / TWO_PI / MHZ,
                three.full_shift / TWO_PI / MHZ,
                two.full_shift / TWO_PI / MHZ,
                cpl.critical_photon_number(g, delta),
            )

        rows = _parallel_map(one, np.linspace(f01_min_ghz, f01_max_ghz, points))
        header = ["f01_GHz", "fc_GHz", "detuning_MHz", "rel_detuning", "alpha_MHz",
                  "two_chi_three_level_MHz", "two_chi_two_level_MHz", "n_crit"]
        payload = {"command": "chi", "circuit": pdict, "fc_ghz": fc_ghz,
                   "f01_range": [f01_min_ghz, f01_max_ghz], "points": points}
        _write_output(out, header, rows, fmt, "chi", payload)
        click.echo(f"wrote {len(rows)} rows to {out}")
    except FluxcadError as err:
        _fail(err)


@main.command("readout-opt")
@_design_options
@click.option("--phi-min", type=float, default=0.01, show_default=True)
@click.option("--phi-max", type=float, default=0.45, show_default=True)
@click.option("--points", type=int, default=201, show_default=True)
@click.option("--q-internal", type=float, default=3444.0, show_default=True)
@click.option("--q-external", type=float, default=309.0, show_default=True)
@click.option("--dip-csv", type=click.Path(), default=None,
              help="Measured dip table (phi_c, depth_linear, width_Hz) overriding the constant model.")
@click.option("--out", type=click.Path(), required=True)
@_format_option
def readout_opt(design, config_path, phi_min, phi_max, points, q_internal,
                q_external, dip_csv, out, fmt):
    """Optimal cavity flux for tunneling readout (flux-state discrimination)."""
    try:
        params, pdict = _resolve_params(design, config_path)
        if dip_csv is not None:
            dip_model = readout.TabulatedDipModel.from_csv(dip_csv)
        else:
            _, f_max = squid.cavity_band(params)
            line = readout.ResonatorLineShape(f_max, q_internal, q_external)
            dip_model = readout.ConstantDipModel.from_lineshape(line)
        grid = np.linspace(phi_min, phi_max, points)
        result = readout.optimize_tunneling_readout(params, dip_model, grid)
        rows = [
            (p.phi_c, p.figure_of_merit, p.separation, p.slope) for p in result.trace
        ]
        header = ["phi_c", "fom", "shift_Hz", "slope_Hz_per_Phi0"]
        payload = {"command": "readout-opt", "circuit": pdict,
                   "phi_range": [phi_min, phi_max], "points": points,
                   "q_internal": q_internal, "q_external": q_external,
                   "dip_csv": bool(dip_csv)}
        _write_output(out, header, rows, fmt, "readout-opt", payload)
        best = result.best
        click.echo(json.dumps({
            "phi_c_optimal": best.phi_c,
            "figure_of_merit": best.figure_of_merit,
            "separation_Hz": best.separation,
            "well_separated": best.well_separated,
            "no_optimum": result.no_optimum,
        }, indent=1))
    except FluxcadError as err:
        _fail(err)


# --- schedule -----------------------------------------------------------------


def _segment_rows(report):
    rows = []
    for i, seg in enumerate(report.per_segment):
        rows.append(
            (
                i,
                seg.mode,
                seg.duration * 1e9,
                seg.phi_q,
                seg.phi_c,
                seg.total_rate,
                seg.detuning / TWO_PI / MHZ,
                seg.g / TWO_PI / MHZ,
                seg.full_shift / TWO_PI / MHZ,
            )
        )
    return rows


def _report_dict(report):
    return {
        "survival_probability": report.survival_probability,
        "effective_t1_us": report.effective_t1 * 1e6,
        "measurement_snr": report.measurement_snr,
        "segments": [
            {
                "mode": s.mode,
                "duration_ns": s.duration * 1e9,
                "phi_q": s.phi_q,
                "phi_c": s.phi_c,
                "gamma_total": s.total_rate,
                "detuning_MHz": s.detuning / TWO_PI / MHZ,
                "g_MHz": s.g / TWO_PI / MHZ,
                "two_chi_MHz": s.full_shift / TWO_PI / MHZ,
            }
            for s in report.per_segment
        ],
    }


def _phi_c_from(section, prefix, params):
    if f"{prefix}_phi_c" in section:
        return float(section[f"{prefix}_phi_c"])
    if f"{prefix}_fc_GHz" in section:
        return squid.cavity_bias_for_frequency(params, float(section[f"{prefix}_fc_GHz"]) * GHZ)
    raise ConfigError(f"compare section needs '{prefix}_phi_c' or '{prefix}_fc_GHz'")


@main.command("schedule")
@click.option("--config", "config_path", type=click.Path(), required=True,
              help="YAML with circuit/design, channel, q_dielectric, and a "
                   "'schedule' or 'compare' section.")
@click.option("--out", type=click.Path(), required=True, help="JSON report path.")
@click.option("--segments-csv", type=click.Path(), default=None,
              help="Optional per-segment CSV table.")
def schedule_cmd(config_path, out, segments_csv):
    """Evaluate a flux schedule, or compare static and dynamic operation."""
    try:
        doc = load_config(config_path)
        if "design" in doc:
            params = design_preset(str(doc["design"])).params
        elif "circuit" in doc:
            params = circuit_from_dict(doc["circuit"])
        else:
            raise ConfigError("schedule config needs 'design' or 'circuit'")
        if "channel" not in doc:
            raise ConfigError("schedule config needs a 'channel' section")
        ch = doc["channel"]
        channel = readout.ReadoutChannel(
            kappa=TWO_PI * float(ch.get("kappa_MHz", 0.0)) * MHZ,
            noise_photons=float(ch.get("noise_photons", 0.0)),
            bandwidth=TWO_PI * float(ch.get("bandwidth_MHz", math.inf)) * MHZ
            if ch.get("bandwidth_MHz") is not None
            else math.inf,
            drive_photons=float(ch.get("drive_photons", 0.0)),
        )
        q_d = float(doc.get("q_dielectric", 82400.0))

        if "compare" in doc:
            section = doc["compare"]
            static, dynamic = sched.compare_static_dynamic(
                params,
                phi_q=float(section["phi_q"]),
                coherent_phi_c=_phi_c_from(section, "coherent", params),
                measurement_phi_c=_phi_c_from(section, "measurement", params),
                evolve_time=float(section["evolve_time_ns"]) * 1e-9,
                measure_time=float(section["measure_time_ns"]) * 1e-9,
                q_dielectric=q_d,
                channel=channel,
            )
            result = {"mode": "compare",
                      "static": _report_dict(static),
                      "dynamic": _report_dict(dynamic)}
            csv_report = dynamic
        elif "schedule" in doc:
            section = doc["schedule"]
            segments = tuple(
                sched.FluxSegment(
                    duration=float(row["duration_ns"]) * 1e-9,
                    phi_q=float(row["phi_q"]),
                    phi_c=float(row["phi_c"]),
                    mode=row.get("mode", "coherent"),
                )
                for row in section.get("segments", [])
            )
            plan = sched.FluxSchedule(
                segments=segments,
                ramp_time=float(section.get("ramp_time_ns", 0.0)) * 1e-9,
                branch_id=int(section.get("branch_id", 0)),
            )
            report = sched.evaluate_schedule(params, plan, q_d, channel)
            result = {"mode": "single", "schedule": _report_dict(report)}
            csv_report = report
        else:
            raise ConfigError("schedule config needs a 'schedule' or 'compare' section")

        payload = {"command": "schedule", "config": doc}
        out_path = Path(out)
        _atomic_write(out_path, json.dumps(result, indent=1) + "\n")
        _write_manifest(out_path, "schedule", payload)
        if segments_csv is not None:
            header = ["index", "mode", "duration_ns", "phi_q", "phi_c",
                      "gamma_total", "detuning_MHz", "g_MHz", "two_chi_MHz"]
            _write_output(segments_csv, header, _segment_rows(csv_report), "csv",
                          "schedule", payload)
        click.echo(f"wrote report to {out}")
    except FluxcadError as err:
        _fail(err)


# --- fitting ------------------------------------------------------------------


def _read_xy_csv(path, min_cols=2):
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    except (OSError, StopIteration) as err:
        raise ConfigError(f"cannot read data file {path}: {err}") from err
    if len(rows) == 0 or len(header) < min_cols:
        raise ConfigError(f"data file {path} needs a header and at least one row")
    try:
        cols = [np.array([float(r[i]) for r in rows]) for i in range(len(header))]
    except (ValueError, IndexError) as err:
        raise ConfigError(f"non-numeric or ragged data in {path}: {err}") from err
    return header, cols


def _parse_free_spec(spec: str):
    try:
        name, rest = spec.split("=", 1)
        init, lo, hi = (float(v) for v in rest.split(","))
    except ValueError as err:
        raise ConfigError(
            f"bad --free spec {spec!r}; expected name=init,lo,hi (CLI units)"
        ) from err
    name = name.strip()
    if name not in _FREE_PARAM_SCALE:
        raise ConfigError(f"unknown fit parameter {name!r}")
    s = _FREE_PARAM_SCALE[name]
    return name, (init * s, lo * s, hi * s)


@main.command("fit")
@click.option("--kind", type=click.Choice(["spectrum", "lineshape", "fluxcal"]),
              required=True)
@click.option("--data", "data_path", type=click.Path(), required=True,
              help="CSV input; spectrum/fluxcal: bias,freq_GHz[,sigma_GHz]; "
                   "lineshape: freq_GHz,s21_mag.")
@_design_options
@click.option("--flavor", type=click.Choice(["cavity", "qubit"]), default="cavity",
              show_default=True)
@click.option("--free", "free_specs", multiple=True,
              help="Free parameter as name=init,lo,hi in CLI units (nH/pF/uA); repeatable.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Recorded in the manifest for reproducibility.")
@click.option("--out", type=click.Path(), required=True,
              help="Result text path; residuals CSV lands next to it.")
def fit_cmd(kind, data_path, design, config_path, flavor, free_specs, seed, out):
    """Fit spectroscopy data, a resonance line shape, or calibrate a flux axis."""
    try:
        out_path = Path(out)
        if kind == "lineshape":
            _, cols = _read_xy_csv(data_path)
            result = fit_lineshape(cols[0] * GHZ, cols[1])
            line = result.line
            text = (
                f"converged: {result.converged}\n"
                f"f0_GHz: {line.f0/GHZ:.9g}\n"
                f"q_internal: {line.q_internal:.6g}\n"
                f"q_external: {line.q_external:.6g}\n"
                f"q_loaded: {line.q_loaded:.6g}\n"
                f"skew_angle_rad: {line.skew_angle:.6g}\n"
                f"residual_rms: {result.residual_rms:.6g}\n"
                f"iterations: {result.iterations}\n"
            )
            payload = {"command": "fit", "kind": kind, "data": str(data_path), "seed": seed}
            _atomic_write(out_path, text)
            _write_manifest(out_path, "fit", payload)
            click.echo(text.rstrip())
            return

        header, cols = _read_xy_csv(data_path)
        bias, freq = cols[0], cols[1] * GHZ
        sigma = cols[2] * GHZ if len(cols) > 2 else None

        if kind == "fluxcal":
            sweep = SpectroscopySweep(bias=bias, frequency=freq, flavor=flavor,
                                      uncertainty=sigma)
            cal = calibrate_flux_axis(sweep)
            text = (
                f"flux_period: {cal.flux_period:.9g}\n"
                f"flux_offset: {cal.flux_offset:.9g}\n"
                f"bias_mutual_pH: {cal.bias_mutual/1e-12:.6g}\n"
            )
            payload = {"command": "fit", "kind": kind, "data": str(data_path), "seed": seed}
            _atomic_write(out_path, text)
            _write_manifest(out_path, "fit", payload)
            click.echo(text.rstrip())
            return

        params, pdict = _resolve_params(design, config_path)
        if not free_specs:
            raise ConfigError("spectrum fit needs at least one --free parameter")
        free = dict(_parse_free_spec(s) for s in free_specs)
        sweep = SpectroscopySweep(bias=bias, frequency=freq, flavor=flavor,
                                  uncertainty=sigma)
        problem = FitProblem(sweep=sweep, base_params=params, free=free)
        result = fit_spectrum(problem)

        fitted = circuit_to_dict(result.best_params)
        lines = [f"converged: {result.converged}",
                 f"residual_rms_MHz: {result.residual_rms/MHZ:.6g}",
                 f"iterations: {result.iterations}",
                 f"dropped_points: {result.n_dropped}"]
        for name in free:
            if name in ("flux_offset", "flux_period"):
                value = getattr(result.calibration, name)
            else:
                value = _value_in_cli_units(result.best_params, name)
            var = result.covariance_diag.get(name, float("nan"))
            sd = math.sqrt(var) / _FREE_PARAM_SCALE[name] if var == var else float("nan")
            lines.append(f"{name}: {value:.9g} +- {sd:.3g}")
        text = "\n".join(lines) + "\n"
        payload = {"command": "fit", "kind": kind, "data": str(data_path),
                   "circuit": pdict, "free": {k: list(v) for k, v in free.items()},
                   "flavor": flavor, "seed": seed}
        _atomic_write(out_path, text)
        _write_manifest(out_path, "fit", payload)

        model = _model_for_residuals(result, sweep)
        rows = [
            (b, f / GHZ, m / GHZ, (m - f) / GHZ)
            for b, f, m in zip(sweep.bias, sweep.frequency, model)
        ]
        resid_path = out_path.with_suffix(".residuals.csv")
        _write_output(resid_path, ["bias", "freq_GHz", "model_GHz", "residual_GHz"],
                      rows, "csv", "fit", payload)
        click.echo(text.rstrip())
    except FluxcadError as err:
        _fail(err)


def _value_in_cli_units(params: CircuitParams, name: str) -> float:
    from .fitting import _PARAM_GETTERS  # CLI-only convenience

    return _PARAM_GETTERS[name](params) / _FREE_PARAM_SCALE[name]


def _model_for_residuals(result, sweep):
    from .fitting import _model_frequencies

    return _model_frequencies(
        result.best_params, sweep, result.calibration.flux_offset,
        result.calibration.flux_period, None,
    )


@main.command()
@click.option("--t1-ns", type=float, required=True)
@click.option("--t2-ns", type=float, required=True)
def coherence(t1_ns, t2_ns):
    """Driven-decay time from separately measured T1 and T2."""
    value = t_prime(t1_ns * 1e-9, t2_ns * 1e-9)
    click.echo(f"t_prime_ns: {value*1e9:.6g}")


@main.command()
@click.option("--design", type=click.Choice(["A", "B"]), required=True)
@click.option("--out", type=click.Path(), default=None,
              help="Write YAML here instead of stdout.")
def presets(design, out):
    """Dump a shipped design preset as an editable config file."""
    preset = design_preset(design)
    text = dump_circuit(preset.params, name=preset.name)
    if out is None:
        click.echo(text)
    else:
        _atomic_write(Path(out), text)
        click.echo(f"wrote {out}")


if __name__ == "__main__":
    main()
