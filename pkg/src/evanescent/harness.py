"""Scenario sweeps, report files and scenario comparison.

A scenario turns a :class:`SweepConfig` into a :class:`ScenarioReport`: a
table of per-separation rows plus a summary holding the inputs, the
exponential fit and pass/fail verdicts against declared tolerances.
:func:`write_report` serialises it as ``<scenario>.csv`` and
``<scenario>.json``.

Config files are flat ``key = value`` text. Energies are given in eV and
lengths in metres; lists are comma separated and ``start:stop:num`` expands to
an evenly spaced range.
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from os import PathLike
from pathlib import Path
from typing import Any, Callable

import numpy as np
import scipy

import evanescent
from evanescent import correlator as corr
from evanescent.entanglement import (
    mode_entanglement_demo,
    rate_vs_separation,
    spectator_transfer_demo,
)
from evanescent.fitting import fit_exponential
from evanescent.scales import (
    CONSTANTS,
    ScaleParams,
    evanescent_wavevector,
    log_suppression,
    relativistic_decay_rate,
    suppression_length,
)
from evanescent.schrodinger import (
    FLAG_BELOW_RESOLUTION,
    PotentialSpec,
    grid_for,
    tunnel_splitting,
)

__all__ = [
    "ConfigError",
    "SweepConfig",
    "ScenarioReport",
    "parse_config",
    "load_config",
    "run_scenario",
    "compare_scenarios",
    "write_report",
    "read_report",
    "SCENARIOS",
]

SCENARIOS = ("suppression", "splitting", "correlator", "entanglement", "compare")

DEFAULT_TOLERANCES = {
    "fit_relative": 1e-12,
    "splitting_relative": 0.10,
    "splitting_r_squared": 0.999,
    "correlator_abs": 1e-6,
    "nonrel_relative": 1e-9,
    "entangle_relative": 1e-3,
    "demo_abs": 1e-9,
}
MAX_FAILED_FRACTION = 0.20
PICOMETER_RANGE = (1e-12, 1e-10)

_DEFAULT_SEPARATIONS_OVER_ELL = {
    "suppression": "1:20:20",
    "compare": "1:20:20",
    "splitting": "3:10:8",
    "correlator": "0.5, 1, 2, 5, 10",
    "entanglement": "1:20:20",
}


class ConfigError(ValueError):
    """Invalid or incomplete sweep configuration."""


def _parse_value(text: str):
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    m = re.fullmatch(r"([^:,]+):([^:,]+):(\d+)", text)
    if m:
        start, stop, num = float(m.group(1)), float(m.group(2)), int(m.group(3))
        return tuple(float(v) for v in np.linspace(start, stop, num))
    if "," in text:
        return tuple(_parse_value(part) for part in text.split(",") if part.strip())
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_config(text: str) -> dict[str, Any]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", key):
            raise ConfigError(f"line {lineno}: bad key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = _parse_value(value)
    return out


def _as_tuple(value) -> tuple[float, ...]:
    if isinstance(value, tuple):
        return tuple(float(v) for v in value)
    return (float(value),)


def _positive(name, value, allow_zero=False):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None
    ok = v >= 0 if allow_zero else v > 0
    if not (math.isfinite(v) and ok):
        kind = "non-negative" if allow_zero else "positive"
        raise ConfigError(f"{name} must be finite and {kind}, got {value!r}")
    return v


@dataclass(frozen=True)
class SweepConfig:
    """Validated scenario configuration (SI units except where named ``_ev``)."""

    scenario: str
    mass: float = 1e-27
    binding_energy_ev: float = 1.0
    separations: tuple[float, ...] | None = None
    separations_over_ell: tuple[float, ...] | None = None
    seed: int = 0
    noise: float = 0.0
    well_width_over_ell: float = 10.0
    well_depth_ev: float | None = None
    n_points: int = 4000
    padding: float = 8.0
    spatial_dimension: int = 1
    quadrature_tolerance: float = 1e-8
    j0_ev: float = 0.01
    theta_max: float = 1e-3
    free_binding_energy_ev: float = 0.0
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    @property
    def binding_energy(self) -> float:
        return self.binding_energy_ev * CONSTANTS.electron_volt

    def scale_params(self, separation: float = 0.0) -> ScaleParams:
        return ScaleParams(self.mass, self.binding_energy, separation)

    def as_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        for k, v in out.items():
            if isinstance(v, tuple):
                out[k] = list(v)
        return out

    @classmethod
    def from_mapping(cls, raw: dict[str, Any], scenario: str | None = None) -> "SweepConfig":
        raw = dict(raw)
        cfg_scenario = raw.pop("scenario", None)
        if cfg_scenario == "entangle":
            cfg_scenario = "entanglement"
        if scenario is not None and cfg_scenario is not None and cfg_scenario != scenario:
            raise ConfigError(f"config is for scenario {cfg_scenario!r}, not {scenario!r}")
        scenario = scenario or cfg_scenario
        if scenario not in SCENARIOS:
            raise ConfigError(f"unknown or missing scenario {scenario!r}")

        tolerances = dict(DEFAULT_TOLERANCES)
        kwargs: dict[str, Any] = {"scenario": scenario}
        for key, value in raw.items():
            if key.startswith("tol_"):
                name = key[4:]
                if name not in tolerances:
                    raise ConfigError(f"unknown tolerance {key!r}")
                tolerances[name] = _positive(key, value)
            elif key in ("separations", "separations_over_ell"):
                vals = _as_tuple(value)
                for v in vals:
                    _positive(key, v, allow_zero=(scenario != "correlator"))
                kwargs[key] = vals
            elif key in ("seed", "n_points", "spatial_dimension"):
                if not isinstance(value, int) or value < 0:
                    raise ConfigError(f"{key} must be a non-negative integer, got {value!r}")
                kwargs[key] = value
            elif key in cls.__dataclass_fields__ and key not in ("scenario", "tolerances"):
                zero_ok = key in ("binding_energy_ev", "noise", "free_binding_energy_ev")
                kwargs[key] = _positive(key, value, allow_zero=zero_ok)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        kwargs["tolerances"] = tolerances
        if "separations" in kwargs and "separations_over_ell" in kwargs:
            raise ConfigError("give separations or separations_over_ell, not both")
        if "separations" not in kwargs and "separations_over_ell" not in kwargs:
            kwargs["separations_over_ell"] = _as_tuple(
                _parse_value(_DEFAULT_SEPARATIONS_OVER_ELL[scenario]))
        cfg = cls(**kwargs)
        cfg._validate()
        return cfg

    def _validate(self):
        if self.scenario == "splitting":
            if self.binding_energy_ev <= 0:
                raise ConfigError("splitting needs a positive binding_energy_ev")
            if self.n_points < 16:
                raise ConfigError("n_points must be at least 16")
        if self.scenario == "entanglement" and self.binding_energy_ev <= 0 \
                and self.separations is None:
            raise ConfigError("entanglement with zero binding needs explicit separations")
        if self.spatial_dimension not in (1, 3):
            raise ConfigError("spatial_dimension must be 1 or 3")
        if self.theta_max > 1e-3:
            raise ConfigError("theta_max must not exceed 1e-3")
        if self.separations_over_ell is not None and self.binding_energy_ev == 0 \
                and self.scenario != "compare":
            raise ConfigError("separations_over_ell is undefined for zero binding; "
                              "give separations in metres")

    def natural_length(self) -> float:
        """Length unit for ``separations_over_ell`` in this scenario."""
        p = self.scale_params()
        if self.scenario == "correlator":
            return 1.0 / relativistic_decay_rate(p)
        return suppression_length(p)

    def resolved_separations(self) -> tuple[float, ...]:
        if self.separations is not None:
            seps = self.separations
        else:
            unit = self.natural_length()
            seps = tuple(f * unit for f in self.separations_over_ell)
        if not seps:
            raise ConfigError("separation list is empty")
        return tuple(sorted(seps))


def load_config(path: str | PathLike, scenario: str | None = None,
                seed: int | None = None) -> SweepConfig:
    cfg = SweepConfig.from_mapping(parse_config(Path(path).read_text()), scenario)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    return cfg


@dataclass
class ScenarioReport:
    scenario: str
    columns: list[str]
    rows: list[tuple]
    summary: dict

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.summary.get("checks", {}).values())

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 2

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def _check(value, expected=None, tolerance=None, passed=None, label=None) -> dict:
    out = {"value": value}
    if expected is not None:
        out["expected"] = expected
    if tolerance is not None:
        out["tolerance"] = tolerance
    if passed is None:
        passed = abs(value - expected) <= tolerance * abs(expected)
    out["pass"] = bool(passed)
    if label:
        out["label"] = f"{label}: {'PASS' if passed else 'FAIL'}"
    return out


def _map(func: Callable, items: list, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _suppression_point(args):
    mass, eb, d = args
    p = ScaleParams(mass, eb, d)
    return (d, evanescent_wavevector(p), suppression_length(p), log_suppression(p))


def _splitting_point(args):
    d, well, height, depth, mass, n_points, padding = args
    pot = PotentialSpec.double_well(well, d, height, depth)
    res = tunnel_splitting(pot, mass, grid_for(pot, mass, n_points, padding))
    return (d, res.e0, res.e1, res.splitting, ";".join(res.flags) or "ok")


def _correlator_point(args):
    mass, eb, dim, d, tol = args
    params = corr.PropagatorParams(mass, eb, dim)
    analytic = corr.static_correlator_log(params, d).log_value
    mu = corr.decay_rate(params)
    if mu == 0.0 or mu * d > corr.MAX_QUADRATURE_DECAY:
        return (d, analytic, math.nan, math.nan)
    one_d = corr.PropagatorParams(mass, eb, 1)
    quad = corr.correlator_quadrature(one_d, d, tol).log_value - math.log(math.pi / mu)
    if dim == 3:
        quad -= math.log(d)
    return (d, analytic, quad, abs(quad - analytic))


_POINT_FUNCS = {
    "suppression": _suppression_point,
    "splitting": _splitting_point,
    "correlator": _correlator_point,
}


def _run_points(kind: str, items: list, workers: int):
    guarded = _map(_GUARDED[kind], items, workers)
    rows, failures = [], []
    for item, (row, err) in zip(items, guarded):
        if err is None:
            rows.append(row)
        else:
            failures.append({"point": list(item) if isinstance(item, tuple) else item,
                             "error": err})
    if items and len(failures) > MAX_FAILED_FRACTION * len(items):
        raise RuntimeError(f"{len(failures)} of {len(items)} {kind} points failed: "
                           f"{failures[0]['error']}")
    rows.sort(key=lambda r: r[0])
    return rows, failures


class _Guard:
    """Picklable per-point wrapper returning ``(row, error)``."""

    def __init__(self, name):
        self.name = name

    def __call__(self, item):
        try:
            return _POINT_FUNCS[self.name](item), None
        except Exception as exc:  # recorded in the report, not raised
            return None, f"{type(exc).__name__}: {exc}"


_GUARDED = {name: _Guard(name) for name in _POINT_FUNCS}


def _suppression(cfg: SweepConfig, workers: int) -> ScenarioReport:
    seps = cfg.resolved_separations()
    rows, failures = _run_points(
        "suppression", [(cfg.mass, cfg.binding_energy, d) for d in seps], workers)
    if cfg.noise > 0:
        rng = np.random.default_rng(cfg.seed)
        noise = rng.normal(0.0, cfg.noise, len(rows))
        rows = [r[:3] + (r[3] + float(e),) for r, e in zip(rows, noise)]
    ell = suppression_length(cfg.scale_params())
    checks, flags = {}, []
    fit = None
    if math.isinf(ell):
        flags.append("AH limit: no suppression")
        if cfg.noise == 0:
            checks["no_suppression"] = _check(
                0.0, passed=all(r[3] == 0.0 for r in rows), label="AH limit")
    else:
        lo, hi = PICOMETER_RANGE
        checks["picometer_scale"] = _check(ell, passed=lo <= ell < hi, label="picometer scale")
        if len(rows) >= 4:
            fit = fit_exponential([(r[0], r[3]) for r in rows])
            tol = cfg.tolerances["fit_relative"] if cfg.noise == 0 else max(
                cfg.tolerances["fit_relative"], 0.02)
            checks["fit_decay_length"] = _check(fit.decay_length, ell, tol)
    summary = {
        "suppression_length_m": ell,
        "kappa_per_m": evanescent_wavevector(cfg.scale_params()),
        "fit": fit.as_dict() if fit else None,
        "flags": flags,
    }
    return _report(cfg, ["separation_m", "kappa_per_m", "ell_m", "log_amplitude"],
                   rows, summary, checks, failures)


def _splitting(cfg: SweepConfig, workers: int) -> ScenarioReport:
    ell = suppression_length(cfg.scale_params())
    well = cfg.well_width_over_ell * ell
    depth = None if cfg.well_depth_ev is None else cfg.well_depth_ev * CONSTANTS.electron_volt
    items = [(d, well, cfg.binding_energy, depth, cfg.mass, cfg.n_points, cfg.padding)
             for d in cfg.resolved_separations()]
    rows, failures = _run_points("splitting", items, workers)
    usable = [r for r in rows if FLAG_BELOW_RESOLUTION not in r[4] and r[3] > 0]
    e0 = float(np.mean([r[1] for r in usable])) if usable else math.nan
    ell_eff = CONSTANTS.hbar / math.sqrt(2 * cfg.mass * (cfg.binding_energy - e0)) \
        if usable else math.nan
    checks, fit = {}, None
    if len(usable) >= 4:
        fit = fit_exponential([(r[0], math.log(r[3])) for r in usable])
        checks["fit_decay_length"] = _check(fit.decay_length, ell_eff,
                                            cfg.tolerances["splitting_relative"])
        checks["fit_r_squared"] = _check(
            fit.r_squared, passed=fit.r_squared >= cfg.tolerances["splitting_r_squared"])
    else:
        checks["enough_resolved_points"] = _check(len(usable), passed=False)
    summary = {
        "suppression_length_m": ell,
        "effective_binding_J": cfg.binding_energy - e0 if usable else None,
        "effective_suppression_length_m": ell_eff,
        "fit": fit.as_dict() if fit else None,
        "flags": sorted({r[4] for r in rows} - {"ok"}),
    }
    return _report(cfg, ["separation_m", "E0_J", "E1_J", "splitting_J", "flag"],
                   rows, summary, checks, failures)


def _correlator(cfg: SweepConfig, workers: int) -> ScenarioReport:
    items = [(cfg.mass, cfg.binding_energy, cfg.spatial_dimension, d, cfg.quadrature_tolerance)
             for d in cfg.resolved_separations()]
    rows, failures = _run_points("correlator", items, workers)
    params = corr.PropagatorParams(cfg.mass, cfg.binding_energy, cfg.spatial_dimension)
    mu = corr.decay_rate(params)
    checks, flags = {}, []
    summary: dict[str, Any] = {
        "pole_location_per_m": corr.pole_location(params),
        "decay_rate_per_m": mu,
    }
    if mu == 0.0:
        flags.append("AH limit: no suppression")
        checks["no_suppression"] = _check(
            0.0, passed=all(r[1] == 0.0 for r in rows), label="AH limit")
    else:
        diffs = [r[3] for r in rows if not math.isnan(r[3])]
        if diffs:
            checks["quadrature_agreement"] = _check(
                max(diffs), passed=max(diffs) <= cfg.tolerances["correlator_abs"])
        nr = corr.nonrel_consistency(params)
        summary["nonrel_relative_error"] = nr.relative_error
        summary["nonrel_first_order"] = nr.first_order
        flags.extend(nr.flags)
        if nr.approximation_valid:
            checks["nonrel_consistency"] = _check(
                nr.relative_error, nr.first_order, cfg.tolerances["nonrel_relative"])
    summary["flags"] = flags
    return _report(cfg, ["separation_m", "log_value_analytic", "log_value_quadrature",
                         "abs_diff"], rows, summary, checks, failures)


def _entanglement(cfg: SweepConfig, workers: int) -> ScenarioReport:
    j0 = cfg.j0_ev * CONSTANTS.electron_volt
    sweep = rate_vs_separation(cfg.scale_params(), j0, cfg.resolved_separations(),
                               cfg.theta_max)
    rows = [(p.separation, p.log_hopping, p.log_probability, p.entropy, p.negativity)
            for p in sweep.points]
    hb = CONSTANTS.hbar
    mode = mode_entanglement_demo(j0, 0.25 * math.pi * hb / j0)
    spec = spectator_transfer_demo(j0, 0.5 * math.pi * hb / j0)
    tol = cfg.tolerances["demo_abs"]
    checks = {
        "mode_entropy_quarter_period": _check(
            mode.entropy, passed=abs(mode.entropy - 1.0) <= tol),
        "spectator_negativity_full_transfer": _check(
            spec.negativity, passed=abs(spec.negativity - 0.5) <= tol),
    }
    flags = []
    if sweep.fit is not None and sweep.fit.decays:
        checks["fit_decay_length"] = _check(sweep.fit.decay_length, 0.5 * sweep.suppression_length,
                                            cfg.tolerances["entangle_relative"])
    elif math.isinf(sweep.suppression_length):
        flags.append("AH limit: no suppression")
    summary = {
        "suppression_length_m": sweep.suppression_length,
        "probe_time_s": sweep.probe_time,
        "j0_J": j0,
        "fit": sweep.fit.as_dict() if sweep.fit else None,
        "mode_demo": {"entropy_bits": mode.entropy, "negativity": mode.negativity},
        "spectator_demo": {"entropy_bits": spec.entropy, "negativity": spec.negativity},
        "flags": flags,
    }
    return _report(cfg, ["separation_m", "log_hopping", "log_probability", "entropy_bits",
                         "negativity"], rows, summary, checks, [])


def _report(cfg, columns, rows, summary, checks, failures) -> ScenarioReport:
    summary = {"scenario": cfg.scenario, "inputs": cfg.as_dict(), **summary,
               "checks": checks, "failures": failures}
    return ScenarioReport(cfg.scenario, columns, rows, summary)


_RUNNERS = {
    "suppression": _suppression,
    "splitting": _splitting,
    "correlator": _correlator,
    "entanglement": _entanglement,
}


def run_scenario(config: SweepConfig, workers: int = 1) -> ScenarioReport:
    """Run one configured sweep and return its report (nothing is written)."""
    if config.scenario == "compare":
        bound = _suppression(replace(config, scenario="suppression"), workers)
        free_cfg = replace(config, scenario="suppression",
                           binding_energy_ev=config.free_binding_energy_ev,
                           separations=config.resolved_separations(),
                           separations_over_ell=None)
        return compare_scenarios(_suppression(free_cfg, workers), bound)
    return _RUNNERS[config.scenario](config, workers)


def compare_scenarios(free_case: ScenarioReport, bound_case: ScenarioReport) -> ScenarioReport:
    """Side-by-side log amplitudes of a free and a bound suppression sweep.

    The headline column is the exponent difference ``ln A_free - ln A_bound``
    at each separation.
    """
    for rep in (free_case, bound_case):
        if "log_amplitude" not in rep.columns:
            raise ValueError(f"{rep.scenario} report has no log_amplitude column")
    d_free = free_case.column("separation_m")
    d_bound = bound_case.column("separation_m")
    if d_free != d_bound:
        raise ValueError("free and bound reports have mismatched separations")
    rows = []
    for d, a_free, a_bound in zip(d_free, free_case.column("log_amplitude"),
                                  bound_case.column("log_amplitude")):
        ratio = a_bound / a_free if a_free != 0 else math.nan
        rows.append((d, a_free, a_bound, a_free - a_bound, ratio))
    diffs = [r[3] for r in rows]
    summary = {
        "scenario": "compare",
        "inputs": {"free": free_case.summary.get("inputs"),
                   "bound": bound_case.summary.get("inputs")},
        "max_exponent_difference": max(diffs),
        "flags": sorted(set(free_case.summary.get("flags", []))
                        | set(bound_case.summary.get("flags", []))),
        "checks": {
            "bound_suppresses": _check(min(diffs), passed=min(diffs) >= 0.0),
        },
        "failures": free_case.summary.get("failures", []) + bound_case.summary.get("failures", []),
    }
    return ScenarioReport("compare", ["separation_m", "log_amplitude_free",
                                      "log_amplitude_bound", "exponent_difference",
                                      "exponent_ratio"], rows, summary)


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def csv_text(report: ScenarioReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_report(report: ScenarioReport, out_dir: str | PathLike) -> tuple[Path, Path]:
    """Write ``<scenario>.csv`` and ``<scenario>.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{report.scenario}.csv"
    json_path = out / f"{report.scenario}.json"
    csv_path.write_text(csv_text(report))
    summary = dict(report.summary)
    summary["data_file"] = csv_path.name
    summary["passed"] = report.passed
    summary["metadata"] = {
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "versions": {"evanescent": evanescent.__version__, "numpy": np.__version__,
                     "scipy": scipy.__version__, "python": platform.python_version()},
    }
    json_path.write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    return csv_path, json_path


def read_report(json_path: str | PathLike) -> ScenarioReport:
    """Load a written report; CSV values come back as floats where numeric."""
    json_path = Path(json_path)
    summary = json.loads(json_path.read_text())
    with open(json_path.parent / summary["data_file"], newline="") as fh:
        reader = csv.reader(fh)
        columns = next(reader)
        rows = []
        for raw in reader:
            row = []
            for v in raw:
                try:
                    row.append(float(v))
                except ValueError:
                    row.append(v)
            rows.append(tuple(row))
    return ScenarioReport(summary["scenario"], columns, rows, summary)
