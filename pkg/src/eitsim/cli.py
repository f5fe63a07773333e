"""Command-line front end.

    eitsim run <config.json> [--out-dir DIR]
    eitsim sweep <config.json> --param atom.gamma_bc --values 0,1e-3,1e-2
    eitsim canonical [--dimensionless] [--kind KIND] > config.json
    eitsim validate [--out-dir DIR]

Configuration files are JSON objects with the top-level keys ``scenario``,
``atom``, ``field``, ``numerics`` and ``output``; the accepted keys are
listed in README.md.  Unknown keys are rejected.  Complex numbers are
written as a plain number or as ``[re, im]``.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from .adiabatic import chi_resonant, rho_ab_quadrature, rho_ba_longtime, rho_bc_quadrature
from .bloch import DensityMatrix3, integrate_bloch, population_ratio_check
from .errors import (
    ConfigError,
    ConvergenceError,
    InsufficientDataError,
    IntegrationError,
    NoPhysicalModeError,
    ParameterError,
    PoleError,
    QuadratureError,
)
from .maxwell import COUPLING_CHOICES, Grid1D, coupling_field_checker, gaussian_pulse, measure_group_velocity, propagate
from .modes import quadratic_residual, slow_light_vg, solve_probe_modes
from .params import AtomParams, FieldParams, canonical_params, derive_rates, dimensionless_params
from .susceptibility import chi_e, chi_m_fixed_point, chi_steady, refractive_index_and_vg, steady_two_coherence

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

KINDS = ("bloch", "adiabatic", "modes", "chi-sweep", "propagate", "sweep")
TOP_KEYS = ("scenario", "atom", "field", "numerics", "output")
NUMERICAL_ERRORS = (
    IntegrationError,
    PoleError,
    ConvergenceError,
    NoPhysicalModeError,
    QuadratureError,
    InsufficientDataError,
    ZeroDivisionError,
    FloatingPointError,
)

# None means "derived from the physics at run time"
NUMERIC_DEFAULTS: dict[str, dict[str, Any]] = {
    "bloch": {"t_end": 100.0, "tol": 1e-8, "n_samples": 201, "rho0": "dark"},
    "adiabatic": {"t_end": None, "n_samples": 101, "rho_bc0": 0.0, "rho_ba0": 0.0},
    "modes": {},
    "chi-sweep": {"detuning_min": None, "detuning_max": None, "n_points": 401, "d_omega": None},
    "propagate": {
        "length": 100.0,
        "n_cells": 500,
        "cfl": 1.0,
        "t_end": None,
        "coupling_choice": "full-bloch",
        "pulse_t0": None,
        "pulse_width": 20.0,
        "n_snapshots": 200,
        "window": None,
    },
}
OUTPUT_DEFAULTS = {"basename": None, "write_csv": True}
COMPLEX_FIELD = ("omega_c_rabi", "omega_p_rabi")
COMPLEX_NUMERICS = ("rho_bc0", "rho_ba0")


# ---------------------------------------------------------------------------
# JSON helpers


def to_jsonable(value):
    """Map complex to [re, im], numpy scalars to Python, non-finite to None."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(float(value.real)), to_jsonable(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def parse_complex(value, where: str) -> complex:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number or [re, im], got a boolean")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{where}: expected a number or [re, im], got {value!r}")


def _parse_real(value, where: str, allow_none: bool = False) -> Optional[float]:
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a real number, got {value!r}")
    return float(value)


# ---------------------------------------------------------------------------
# configuration


@dataclass
class SweepSpec:
    base: str
    param: str
    values: list


@dataclass
class ScenarioConfig:
    """Validated scenario.  ``numerics`` and ``output`` have defaults filled in."""

    kind: str
    atom: AtomParams
    field: FieldParams
    numerics: dict
    output: dict
    name: Optional[str] = None
    sweep: Optional[SweepSpec] = None

    @property
    def run_kind(self) -> str:
        return self.sweep.base if self.sweep else self.kind

    def to_dict(self) -> dict:
        scenario: dict[str, Any] = {"kind": self.kind}
        if self.name is not None:
            scenario["name"] = self.name
        if self.sweep is not None:
            scenario.update(base=self.sweep.base, param=self.sweep.param, values=list(self.sweep.values))
        return {
            "scenario": scenario,
            "atom": {f.name: getattr(self.atom, f.name) for f in fields(AtomParams)},
            "field": {
                "omega_c_rabi": self.field.omega_c_rabi,
                "omega_p_rabi": self.field.omega_p_rabi,
                "sigma": self.field.sigma,
                "k_hat_p": list(self.field.k_hat_p),
            },
            "numerics": dict(self.numerics),
            "output": dict(self.output),
        }


def _check_keys(block: dict, allowed, where: str):
    if not isinstance(block, dict):
        raise ConfigError(f"{where}: expected a JSON object")
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}; allowed: {', '.join(sorted(allowed))}")


def _build_atom(block: dict) -> AtomParams:
    names = [f.name for f in fields(AtomParams)]
    _check_keys(block, names, "atom")
    kwargs = {}
    for key, value in block.items():
        allow_none = key == "number_density"
        kwargs[key] = _parse_real(value, f"atom.{key}", allow_none)
    try:
        return AtomParams(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"atom: {exc}") from None
    except (ParameterError, ValueError) as exc:
        raise ConfigError(f"atom: {exc}") from None


def _build_field(block: dict) -> FieldParams:
    allowed = ("omega_c_rabi", "omega_p_rabi", "sigma", "k_hat_p")
    _check_keys(block, allowed, "field")
    if "omega_c_rabi" not in block:
        raise ConfigError("field: omega_c_rabi is required")
    kwargs: dict[str, Any] = {}
    for key in COMPLEX_FIELD:
        if key in block:
            kwargs[key] = parse_complex(block[key], f"field.{key}")
    if "sigma" in block:
        kwargs["sigma"] = _parse_real(block["sigma"], "field.sigma", allow_none=True)
    if "k_hat_p" in block:
        k = block["k_hat_p"]
        if not (isinstance(k, list) and len(k) == 3):
            raise ConfigError("field.k_hat_p: expected a list of three numbers")
        kwargs["k_hat_p"] = tuple(_parse_real(v, "field.k_hat_p") for v in k)
    try:
        return FieldParams(**kwargs)
    except (ParameterError, ValueError) as exc:
        raise ConfigError(f"field: {exc}") from None


def _build_numerics(kind: str, block: dict) -> dict:
    defaults = NUMERIC_DEFAULTS[kind]
    _check_keys(block, defaults, "numerics")
    out = copy.deepcopy(defaults)
    for key, value in block.items():
        where = f"numerics.{key}"
        if key in COMPLEX_NUMERICS:
            out[key] = parse_complex(value, where)
        elif key == "rho0":
            if value == "dark":
                out[key] = "dark"
            elif isinstance(value, list) and len(value) == 6:
                out[key] = [parse_complex(v, f"{where}[{i}]") for i, v in enumerate(value)]
            else:
                raise ConfigError(f"{where}: expected \"dark\" or [aa, bb, cc, ab, ac, bc]")
        elif key == "coupling_choice":
            if value not in COUPLING_CHOICES:
                raise ConfigError(f"{where}: must be one of {', '.join(COUPLING_CHOICES)}")
            out[key] = value
        elif key == "window":
            if value is None:
                out[key] = None
            elif isinstance(value, list) and len(value) == 2:
                out[key] = [_parse_real(v, where) for v in value]
            else:
                raise ConfigError(f"{where}: expected null or [z_lo, z_hi]")
        elif key in ("n_samples", "n_points", "n_cells", "n_snapshots"):
            if isinstance(value, bool) or not isinstance(value, int) or value < 2:
                raise ConfigError(f"{where}: expected an integer >= 2")
            out[key] = value
        else:
            out[key] = _parse_real(value, where, allow_none=defaults[key] is None)
    return out


def _build_output(block: dict) -> dict:
    _check_keys(block, OUTPUT_DEFAULTS, "output")
    out = dict(OUTPUT_DEFAULTS)
    if "basename" in block:
        b = block["basename"]
        if b is not None and (not isinstance(b, str) or not b or "/" in b or "\\" in b):
            raise ConfigError("output.basename: expected a plain file name")
        out["basename"] = b
    if "write_csv" in block:
        if not isinstance(block["write_csv"], bool):
            raise ConfigError("output.write_csv: expected true or false")
        out["write_csv"] = block["write_csv"]
    return out


def config_from_dict(doc: dict) -> ScenarioConfig:
    """Validate a parsed JSON document and build a :class:`ScenarioConfig`."""
    _check_keys(doc, TOP_KEYS, "top level")
    for key in ("scenario", "atom", "field"):
        if key not in doc:
            raise ConfigError(f"missing top-level key {key!r}")
    scen = doc["scenario"]
    _check_keys(scen, ("kind", "name", "base", "param", "values"), "scenario")
    kind = scen.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"scenario.kind must be one of {', '.join(KINDS)}; got {kind!r}")
    name = scen.get("name")
    if name is not None and not isinstance(name, str):
        raise ConfigError("scenario.name: expected a string")
    sweep = None
    if kind == "sweep":
        base = scen.get("base")
        if base not in KINDS or base == "sweep":
            raise ConfigError("scenario.base must name a non-sweep scenario kind")
        param, values = scen.get("param"), scen.get("values")
        if not isinstance(param, str):
            raise ConfigError("scenario.param: expected a dotted parameter path")
        if not isinstance(values, list) or not values:
            raise ConfigError("scenario.values: expected a non-empty list")
        sweep = SweepSpec(base, param, list(values))
    else:
        extra = sorted(k for k in ("base", "param", "values") if k in scen)
        if extra:
            raise ConfigError(f"scenario: key(s) {', '.join(extra)} only apply to kind 'sweep'")
    run_kind = sweep.base if sweep else kind
    cfg = ScenarioConfig(
        kind=kind,
        atom=_build_atom(doc["atom"]),
        field=_build_field(doc["field"]),
        numerics=_build_numerics(run_kind, doc.get("numerics", {})),
        output=_build_output(doc.get("output", {})),
        name=name,
        sweep=sweep,
    )
    if sweep:
        for value in sweep.values:  # fail early on a bad path or value
            with_value(cfg, sweep.param, value)
    return cfg


def load_config(path) -> ScenarioConfig:
    """Read and validate a configuration file.

    Raises
    ------
    ConfigError
        For a missing or empty file, malformed JSON (with line and column)
        or any schema violation.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    if not text.strip():
        raise ConfigError(f"{path}: configuration file is empty")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return config_from_dict(doc)


def with_value(cfg: ScenarioConfig, path: str, value) -> ScenarioConfig:
    """Copy of ``cfg`` (as a non-sweep scenario) with ``path`` set to ``value``."""
    doc = to_jsonable(cfg.to_dict())
    parts = path.split(".")
    if len(parts) != 2 or parts[0] not in ("atom", "field", "numerics"):
        raise ConfigError(f"parameter path {path!r} must look like atom.<name>, field.<name> or numerics.<name>")
    section, key = parts
    run_kind = cfg.run_kind
    known = (
        doc[section].keys()
        if section != "numerics"
        else NUMERIC_DEFAULTS[run_kind].keys()
    )
    if key not in known:
        raise ConfigError(f"parameter path {path!r} does not resolve to a field")
    current = doc[section].get(key)
    if isinstance(current, (list, dict, str)) and key not in COMPLEX_FIELD + COMPLEX_NUMERICS:
        raise ConfigError(f"parameter path {path!r} is not a scalar")
    doc[section][key] = value
    doc["scenario"] = {"kind": run_kind}
    if cfg.name is not None:
        doc["scenario"]["name"] = cfg.name
    return config_from_dict(doc)


# ---------------------------------------------------------------------------
# scenario runners.  Each returns (results dict, csv header, csv rows).


def derived_scalars(atom: AtomParams, fld: FieldParams) -> dict:
    """Every closed-form scalar that is defined for these parameters."""
    out: dict[str, Any] = {}
    try:
        rates = derive_rates(atom, fld)
    except ZeroDivisionError as exc:
        return {"error": str(exc)}
    out["lambda"] = rates.lam
    out["beta"] = rates.beta
    oc = fld.omega_c_rabi
    for key, func in (
        ("chi_resonant", lambda: chi_resonant(atom, fld)),
        ("chi_steady_center", lambda: chi_steady(atom.omega_ab, atom, oc)),
        ("chi_e", lambda: chi_e(atom, oc)),
        ("chi_m", lambda: chi_m_fixed_point(atom, oc).chi_m),
    ):
        try:
            out[key] = func()
        except (PoleError, ConvergenceError) as exc:
            out[key] = None
            out[key + "_error"] = str(exc)
    sl = slow_light_vg(rates, atom, fld)
    out["v_g_slow_light_final"] = sl.final
    if fld.sigma is not None:
        out["v_g_slow_light_intermediate"] = sl.intermediate
        out["dominance_ratio"] = sl.dominance_ratio
        try:
            mode = solve_probe_modes(rates, atom, fld)
        except NoPhysicalModeError as exc:
            out["modes_error"] = str(exc)
        else:
            out.update(
                zeta=mode.zeta,
                varsigma=mode.varsigma,
                eta_plus=mode.eta_plus,
                eta_minus=mode.eta_minus,
                v_g_plus=mode.v_g_plus,
                v_g_minus=mode.v_g_minus,
                v_g=mode.v_g,
                branch=mode.branch,
                branch_mismatch=mode.branch_mismatch,
                growing=mode.growing,
            )
    return out


def _state_row(t, y):
    aa, bb, cc, ab, ac, bc = y
    return [t, aa.real, bb.real, cc.real, ab.real, ab.imag, ac.real, ac.imag, bc.real, bc.imag, (aa + bb + cc).real]


def run_bloch(cfg: ScenarioConfig):
    num = cfg.numerics
    atom, fld = cfg.atom, cfg.field
    if num["rho0"] == "dark":
        rho0 = DensityMatrix3.dark()
    else:
        v = num["rho0"]
        rho0 = DensityMatrix3(v[0].real, v[1].real, v[2].real, v[3], v[4], v[5])
    times = np.linspace(0.0, num["t_end"], num["n_samples"])
    traj = integrate_bloch(rho0, atom, fld.omega_p_rabi, fld.omega_c_rabi, (0.0, num["t_end"]), tol=num["tol"], t_eval=times)
    header = ["t", "rho_aa", "rho_bb", "rho_cc", "re_rho_ab", "im_rho_ab", "re_rho_ac", "im_rho_ac", "re_rho_bc", "im_rho_bc", "trace"]
    rows = [_state_row(t, y) for t, y in zip(traj.times, traj.y)]
    final = traj.y[-1]
    results = {
        "final_state": {"aa": final[0].real, "bb": final[1].real, "cc": final[2].real, "ab": final[3], "ac": final[4], "bc": final[5]},
        "trace_final": float(traj.trace[-1].real),
        "population_ratio_check": population_ratio_check(traj, atom),
        "n_accepted": traj.n_accepted,
        "n_rejected": traj.n_rejected,
    }
    return results, header, rows


def run_adiabatic(cfg: ScenarioConfig):
    num = cfg.numerics
    atom, fld = cfg.atom, cfg.field
    rates = derive_rates(atom, fld)
    t_end = num["t_end"] if num["t_end"] is not None else 50.0 / rates.lam
    times = np.linspace(0.0, t_end, num["n_samples"])
    op = complex(fld.omega_p_rabi)

    def drive(_t):
        return op

    def zero(_t):
        return 0j

    rows = []
    rho_ab0 = np.conj(num["rho_ba0"])
    for t in times:
        bc = rho_bc_quadrature(drive, rates, fld.omega_c_rabi, atom.gamma_ab, num["rho_bc0"], t)
        ab = rho_ab_quadrature(drive, rates, atom.gamma_ab, atom.gamma_bc, rho_ab0, t, omega_p_dot=zero)
        rows.append([t, bc.real, bc.imag, ab.real, ab.imag])
    steady = steady_two_coherence(atom, op, fld.omega_c_rabi)
    results = {
        "t_end": t_end,
        "rho_bc_final": complex(rows[-1][1], rows[-1][2]),
        "rho_ab_final": complex(rows[-1][3], rows[-1][4]),
        "rho_ba_longtime": rho_ba_longtime(op, rates, atom.gamma_ab, atom.gamma_bc),
        "steady_rho_ab": steady.rho_ab,
        "steady_rho_cb": steady.rho_cb,
    }
    return results, ["t", "re_rho_bc", "im_rho_bc", "re_rho_ab", "im_rho_ab"], rows


def run_modes(cfg: ScenarioConfig):
    atom, fld = cfg.atom, cfg.field
    if fld.sigma is None:
        raise ConfigError("field.sigma is required for the modes scenario")
    rates = derive_rates(atom, fld)
    mode = solve_probe_modes(rates, atom, fld)
    results = {
        "v_g_minus": mode.v_g_minus,
        "v_g_plus": mode.v_g_plus,
        "v_g": mode.v_g,
        "residual_v_g_plus": quadratic_residual(mode.v_g_plus, rates, atom, fld.sigma),
        "residual_v_g_minus": quadratic_residual(mode.v_g_minus, rates, atom, fld.sigma),
    }
    header = ["quantity", "re", "im"]
    rows = []
    for key in ("lambda", "beta", "zeta", "varsigma", "eta_plus", "eta_minus", "v_g_plus", "v_g_minus", "v_g"):
        value = {"lambda": rates.lam, "beta": rates.beta}.get(key)
        if value is None:
            value = getattr(mode, key)
        value = complex(value)
        rows.append([key, value.real, value.imag])
    return results, header, rows


def run_chi_sweep(cfg: ScenarioConfig):
    num = cfg.numerics
    atom, fld = cfg.atom, cfg.field
    lo = num["detuning_min"] if num["detuning_min"] is not None else -10.0 * atom.gamma_ab
    hi = num["detuning_max"] if num["detuning_max"] is not None else 10.0 * atom.gamma_ab
    if not hi > lo:
        raise ConfigError("numerics: detuning_max must exceed detuning_min")
    omegas = atom.omega_ab + np.linspace(lo, hi, num["n_points"])
    chi = chi_steady(omegas, atom, fld.omega_c_rabi)
    n = np.sqrt(1.0 + chi.astype(complex))
    rows = [[w, c.real, c.imag, m.real, m.imag] for w, c, m in zip(omegas, chi, n)]
    center = chi_steady(atom.omega_ab, atom, fld.omega_c_rabi)
    n0, v_disp = refractive_index_and_vg(atom.omega_ab, atom, fld.omega_c_rabi, num["d_omega"])
    results = {
        "chi_center": center,
        "im_chi_center": center.imag,
        "n_center": n0,
        "v_g_dispersive": v_disp,
        "detuning_min": lo,
        "detuning_max": hi,
    }
    try:
        cm = chi_m_fixed_point(atom, fld.omega_c_rabi)
        ce = chi_e(atom, fld.omega_c_rabi)
        results.update(
            eps_r=1.0 + ce,
            mu_r=1.0 + cm.chi_m,
            negative_eps=(1.0 + ce).real < 0,
            negative_mu=(1.0 + cm.chi_m).real < 0,
            near_branch_cut=cm.near_branch_cut,
        )
    except PoleError as exc:
        results["chi_m_error"] = str(exc)
    return results, ["omega", "re_chi", "im_chi", "re_n", "im_n"], rows


def run_propagate(cfg: ScenarioConfig):
    num = cfg.numerics
    atom, fld = cfg.atom, cfg.field
    grid = Grid1D.uniform(num["length"], num["n_cells"], atom.c, num["cfl"])
    width = num["pulse_width"]
    t0 = num["pulse_t0"] if num["pulse_t0"] is not None else 3.0 * width
    rates = derive_rates(atom, fld)
    v_target = slow_light_vg(rates, atom, fld).final if atom.kappa > 0 else atom.c
    t_end = num["t_end"] if num["t_end"] is not None else t0 + 0.85 * num["length"] / v_target
    pulse = gaussian_pulse(fld.omega_p_rabi, t0, width)
    record = propagate(grid, atom, fld.omega_c_rabi, pulse, num["coupling_choice"], t_end, n_snapshots=num["n_snapshots"])
    window = tuple(num["window"]) if num["window"] is not None else None
    fit = measure_group_velocity(record, window)
    results = {
        "v_fit": fit.v_fit,
        "v_fit_stderr": fit.stderr,
        "n_fit_samples": fit.n_samples,
        "v_g_analytic": v_target,
        "relative_error": abs(fit.v_fit - v_target) / v_target,
        "energy_in": record.energy_in,
        "energy_out": record.energy_out,
        "n_steps": record.n_steps,
        "t_end": t_end,
        "peak_monotone": record.peak_monotone(),
        "max_rho_ab": record.max_rho_ab,
    }
    if record.max_rho_ac is not None:
        rep = coupling_field_checker(record)
        results.update(max_rho_ac=rep.max_rho_ac, rho_ac_over_rho_ab=rep.ratio)
    rows = [[t, z] for t, z in zip(record.peak_times, record.peak_positions)]
    return results, ["t", "z_peak"], rows


RUNNERS = {
    "bloch": run_bloch,
    "adiabatic": run_adiabatic,
    "modes": run_modes,
    "chi-sweep": run_chi_sweep,
    "propagate": run_propagate,
}


# ---------------------------------------------------------------------------
# output


def write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])


def _csv_cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def execute(cfg: ScenarioConfig, out_dir: Path) -> dict:
    """Run one (non-sweep) scenario and write its artefacts to ``out_dir``."""
    kind = cfg.run_kind
    out_dir.mkdir(parents=True, exist_ok=True)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        derived = derived_scalars(cfg.atom, cfg.field)
        results, header, rows = RUNNERS[kind](cfg)
    basename = cfg.output["basename"] or kind.replace("-", "_")
    files = []
    if cfg.output["write_csv"]:
        write_csv(out_dir / f"{basename}.csv", header, rows)
        files.append(f"{basename}.csv")
    summary = {
        "tool": "eitsim",
        "version": __version__,
        "config": cfg.to_dict(),
        "derived": derived,
        "results": results,
        "files": files,
        "warnings": sorted({f"{w.category.__name__}: {w.message}" for w in caught}),
    }
    (out_dir / "summary.json").write_text(dumps(summary), encoding="utf-8")
    return summary


def _flatten(prefix: str, value, out: dict):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else k, value[k], out)
    elif isinstance(value, (complex, np.complexfloating)):
        out[f"re_{prefix}"] = float(value.real)
        out[f"im_{prefix}"] = float(value.imag)
    elif isinstance(value, (bool, np.bool_)):
        out[prefix] = bool(value)
    elif isinstance(value, (int, float, np.integer, np.floating, str)) or value is None:
        out[prefix] = value


def execute_sweep(cfg: ScenarioConfig, out_dir: Path, threads: int = 1) -> list[dict]:
    """Run the base scenario once per value, concurrently, then aggregate."""
    sweep = cfg.sweep
    runs = [with_value(cfg, sweep.param, v) for v in sweep.values]
    out_dir.mkdir(parents=True, exist_ok=True)
    width = max(3, len(str(len(runs) - 1)))

    def one(item):
        i, run_cfg = item
        return execute(run_cfg, out_dir / f"run_{i:0{width}d}")

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        summaries = list(pool.map(one, enumerate(runs)))

    flat_rows = []
    for i, (value, summary) in enumerate(zip(sweep.values, summaries)):
        flat: dict[str, Any] = {}
        _flatten("", summary["results"], flat)
        row = {"index": i}
        _flatten(sweep.param, parse_complex(value, sweep.param) if isinstance(value, list) else value, row)
        row.update(flat)
        flat_rows.append(row)
    key_cols = [k for k in flat_rows[0] if k == "index" or k.endswith(sweep.param)]
    other = sorted({k for r in flat_rows for k in r} - set(key_cols))
    header = key_cols + other
    write_csv(out_dir / "sweep.csv", header, [[r.get(k, "") for k in header] for r in flat_rows])
    summary = {
        "tool": "eitsim",
        "version": __version__,
        "config": cfg.to_dict(),
        "runs": [f"run_{i:0{width}d}" for i in range(len(runs))],
        "files": ["sweep.csv"],
    }
    (out_dir / "summary.json").write_text(dumps(summary), encoding="utf-8")
    return summaries


# ---------------------------------------------------------------------------
# canonical configuration


def canonical_config(kind: str = "modes", dimensionless: bool = False) -> dict:
    """Config document with the typical EIT parameters for ``kind``."""
    if kind not in RUNNERS:
        raise ConfigError(f"kind must be one of {', '.join(RUNNERS)}")
    atom, fld = dimensionless_params() if dimensionless else canonical_params()
    if fld.sigma is None:
        fld = FieldParams(fld.omega_c_rabi, fld.omega_p_rabi, 1.0, fld.k_hat_p)
    cfg = ScenarioConfig(
        kind=kind,
        atom=atom,
        field=fld,
        numerics=copy.deepcopy(NUMERIC_DEFAULTS[kind]),
        output=dict(OUTPUT_DEFAULTS),
        name="canonical-dimensionless" if dimensionless else "canonical",
    )
    return to_jsonable(cfg.to_dict())


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default="eitsim-out", help="directory for CSV and JSON artefacts")
    common.add_argument("--quiet", action="store_true", help="print nothing on success")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sweeps and validation")

    parser = argparse.ArgumentParser(prog="eitsim", description="Three-level EIT Maxwell-Bloch simulator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", parents=[common], help="run one scenario file")
    p_run.add_argument("config")

    p_sweep = sub.add_parser("sweep", parents=[common], help="sweep one parameter of a scenario")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--param", required=True, help="dotted path, e.g. field.omega_c_rabi")
    p_sweep.add_argument("--values", required=True, help="comma-separated list of values")

    p_can = sub.add_parser("canonical", help="print a canonical configuration to stdout")
    p_can.add_argument("--kind", default="modes", choices=sorted(RUNNERS))
    p_can.add_argument("--dimensionless", action="store_true", help="units gamma_ab = c = 1")

    sub.add_parser("validate", parents=[common], help="run the cross-module validation checks")
    return parser


def _parse_values(text: str) -> list:
    values = []
    for item in text.split(","):
        item = item.strip()
        try:
            values.append(json.loads(item))
        except json.JSONDecodeError:
            raise ConfigError(f"--values: cannot parse {item!r} as a number") from None
    if not values:
        raise ConfigError("--values: empty list")
    return values


def _say(args, text: str):
    if not getattr(args, "quiet", False):
        print(text)


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    out = Path(args.out_dir)
    if cfg.sweep is not None:
        execute_sweep(cfg, out, args.threads)
        _say(args, f"sweep of {cfg.sweep.param} over {len(cfg.sweep.values)} values written to {out}")
    else:
        summary = execute(cfg, out)
        _say(args, dumps(summary["results"]).rstrip())
    return EXIT_OK


def _cmd_sweep(args) -> int:
    base = load_config(args.config)
    values = _parse_values(args.values)
    doc = to_jsonable(base.to_dict())
    doc["scenario"] = {"kind": "sweep", "base": base.run_kind, "param": args.param, "values": values}
    if base.name is not None:
        doc["scenario"]["name"] = base.name
    cfg = config_from_dict(doc)
    out = Path(args.out_dir)
    execute_sweep(cfg, out, args.threads)
    _say(args, f"sweep of {args.param} over {len(values)} values written to {out / 'sweep.csv'}")
    return EXIT_OK


def _cmd_canonical(args) -> int:
    sys.stdout.write(dumps(canonical_config(args.kind, args.dimensionless)))
    return EXIT_OK


def _cmd_validate(args) -> int:
    from .validation import format_table, run_all

    reports = run_all(threads=max(1, args.threads))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = {"checks": [r.to_dict() for r in reports], "all_as_expected": all(r.as_expected for r in reports)}
    (out / "validation.json").write_text(dumps(doc), encoding="utf-8")
    _say(args, format_table(reports))
    return EXIT_OK if doc["all_as_expected"] else EXIT_VALIDATION


COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "canonical": _cmd_canonical, "validate": _cmd_validate}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be >= 1")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ParameterError) as exc:
        print(f"eitsim: configuration error: {exc}", file=sys.stderr)
        if args.command in ("run", "sweep"):
            parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as exc:
        print(f"eitsim: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
