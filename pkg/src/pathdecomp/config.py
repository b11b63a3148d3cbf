"""Run configuration: YAML parsing, validation and defaults.

Validation collects every problem it finds (unknown keys with a nearest
valid suggestion, missing experiment requirements, out-of-range values)
and reports them together instead of stopping at the first.
"""

from __future__ import annotations

import copy
import difflib
from dataclasses import dataclass, field
from typing import Any

import yaml

from .core import GridModel, PhysicalParams, PotentialSpec
from .errors import ConfigError
from .pdx import QuadratureSpec
from .projectors import RegionSpec

EXPERIMENTS = (
    "resolution-identity",
    "pdx-position",
    "pdx-same-side",
    "pdx-generalized",
    "pdx-momentum",
    "zeno-convergence",
    "crossing-distribution",
    "oracle-suite",
)

DEFAULTS: dict[str, Any] = {
    "model": {
        "grid": {"n_points": 256, "x_min": -10.0, "x_max": 10.0,
                 "boundary": "hard-wall"},
        "params": {"mass": 1.0, "hbar": 1.0, "omega": 0.0},
        "potential": {"kind": "free"},
    },
    "region": {
        "position": {"boundary": 0.0, "side_of_c": "above",
                     "boundary_membership": "C"},
    },
    "numeric": {
        "times": {"t_start": 0.0, "t_end": 1.0},
        "quadrature": {"rule": "simpson", "n_nodes": 129},
        "slicing": {"n_slices": 32},
        "smearing": {"src_center": -2.0, "dst_center": 2.0, "width": 0.5,
                     "momentum": 0.0},
        "zeno_k": [8, 32, 128],
        "windows": [],
        "tolerances": {"residual": 5.0e-2, "identity": 1.0e-11,
                       "oracle": 1.0e-6},
    },
    "output": {"dir": "out", "formats": ["json"]},
}

_KNOWN = {
    "": {"experiment", "model", "region", "numeric", "output"},
    "model": {"grid", "params", "potential"},
    "model.grid": {"n_points", "x_min", "x_max", "boundary"},
    "model.params": {"mass", "hbar", "omega"},
    "model.potential": {"kind", "samples"},
    "region": {"position", "momentum"},
    "region.position": {"boundary", "side_of_c", "boundary_membership"},
    "region.momentum": set(),
    "numeric": {"times", "quadrature", "slicing", "smearing", "zeno_k",
                "windows", "tolerances"},
    "numeric.times": {"t_start", "t_end"},
    "numeric.quadrature": {"rule", "n_nodes"},
    "numeric.slicing": {"n_slices"},
    "numeric.smearing": {"src_center", "dst_center", "width", "momentum"},
    "numeric.tolerances": {"residual", "identity", "oracle"},
    "output": {"dir", "formats"},
}


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    grid: GridModel
    params: PhysicalParams
    potential: PotentialSpec
    region: RegionSpec | None
    region_basis: str | None
    times: tuple[float, float]
    quadrature: QuadratureSpec
    n_slices: int
    smearing: dict
    zeno_k: list[int]
    windows: list[tuple[float, float]]
    tolerances: dict
    output_dir: str
    output_formats: list[str]
    effective: dict = field(repr=False)


def _check_unknown_keys(data: dict, path: str, errors: list[str]):
    known = _KNOWN.get(path)
    if known is None:
        return
    for key in data:
        if key not in known:
            hint = difflib.get_close_matches(str(key), sorted(known), n=1)
            suffix = f" (did you mean {hint[0]!r}?)" if hint else ""
            where = f"{path}.{key}" if path else str(key)
            errors.append(f"unknown key {where!r}{suffix}")
    for key, value in data.items():
        child = f"{path}.{key}" if path else str(key)
        if isinstance(value, dict) and child in _KNOWN:
            _check_unknown_keys(value, child, errors)


def _merge_defaults(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge_defaults(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _positive(value, name, errors, strict=True):
    try:
        v = float(value)
    except (TypeError, ValueError):
        errors.append(f"{name} must be a number, got {value!r}")
        return None
    if strict and v <= 0:
        errors.append(f"{name} must be positive, got {v}")
        return None
    if not strict and v < 0:
        errors.append(f"{name} must be non-negative, got {v}")
        return None
    return v


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a YAML run configuration."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"invalid YAML: {exc}"]) from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(["configuration must be a mapping at top level"])
    return build_config(raw)


def build_config(raw: dict) -> RunConfig:
    errors: list[str] = []
    _check_unknown_keys(raw, "", errors)

    experiment = raw.get("experiment")
    if experiment is None:
        errors.append("missing required key 'experiment'")
    elif experiment not in EXPERIMENTS:
        hint = difflib.get_close_matches(str(experiment), EXPERIMENTS, n=1)
        suffix = f" (did you mean {hint[0]!r}?)" if hint else ""
        errors.append(f"unknown experiment {experiment!r}{suffix}")

    region_raw = raw.get("region")
    defaults = copy.deepcopy(DEFAULTS)
    if isinstance(region_raw, dict) and "momentum" in region_raw:
        defaults["region"] = {"momentum": {}}
    effective = _merge_defaults(defaults, raw)
    effective["experiment"] = experiment

    # Momentum-basis experiments default to a periodic grid.
    region_block = effective["region"]
    if isinstance(region_raw, dict) and len(
        [k for k in ("position", "momentum") if k in region_raw]
    ) > 1:
        errors.append("region block must contain exactly one of "
                      "'position' or 'momentum'")

    grid_cfg = effective["model"]["grid"]
    params_cfg = effective["model"]["params"]
    pot_cfg = effective["model"]["potential"]

    mass = _positive(params_cfg.get("mass"), "params.mass", errors)
    hbar = _positive(params_cfg.get("hbar"), "params.hbar", errors)
    omega = _positive(params_cfg.get("omega"), "params.omega", errors, strict=False)

    grid = params = potential = None
    if not errors:
        try:
            if "momentum" in region_block and grid_cfg["boundary"] == "hard-wall":
                grid_cfg = dict(grid_cfg, boundary="periodic")
                effective["model"]["grid"]["boundary"] = "periodic"
            grid = GridModel(int(grid_cfg["n_points"]), float(grid_cfg["x_min"]),
                             float(grid_cfg["x_max"]), grid_cfg["boundary"])
        except (ValueError, TypeError, KeyError) as exc:
            errors.append(f"model.grid: {exc}")
        try:
            params = PhysicalParams(mass, hbar, omega)
        except ValueError as exc:
            errors.append(f"model.params: {exc}")
        try:
            samples = pot_cfg.get("samples")
            if pot_cfg["kind"] == "custom" and samples is not None:
                import numpy as np

                samples = np.asarray(samples, dtype=float)
            potential = PotentialSpec(pot_cfg["kind"], samples)
        except ValueError as exc:
            errors.append(f"model.potential: {exc}")

    region = None
    region_basis = None
    if not errors:
        if "momentum" in region_block:
            region_basis = "momentum"
            region = RegionSpec(basis="momentum", boundary=0.0,
                                boundary_membership="Cbar")
        else:
            region_basis = "position"
            pos = region_block["position"]
            try:
                region = RegionSpec(
                    basis="position",
                    boundary=float(pos["boundary"]),
                    side_of_c=pos["side_of_c"],
                    boundary_membership=pos["boundary_membership"],
                )
            except ValueError as exc:
                errors.append(f"region.position: {exc}")

    numeric = effective["numeric"]
    times = (float(numeric["times"]["t_start"]), float(numeric["times"]["t_end"]))
    if times[1] <= times[0] and experiment != "oracle-suite":
        errors.append("numeric.times: t_end must exceed t_start")
    quadrature = None
    try:
        quadrature = QuadratureSpec(numeric["quadrature"]["rule"],
                                    int(numeric["quadrature"]["n_nodes"]))
    except ValueError as exc:
        errors.append(f"numeric.quadrature: {exc}")
    n_slices = int(numeric["slicing"]["n_slices"])
    if n_slices < 1:
        errors.append("numeric.slicing.n_slices must be >= 1")
    zeno_k = [int(k) for k in numeric["zeno_k"]]
    if experiment == "zeno-convergence":
        if len(zeno_k) < 3 or sorted(zeno_k) != zeno_k:
            errors.append("numeric.zeno_k must be an ascending list of >= 3 values")
    windows = [tuple(map(float, w)) for w in numeric["windows"]]
    tolerances = dict(numeric["tolerances"])
    for name, value in tolerances.items():
        # YAML 1.1 reads bare forms like 1e-30 as strings; accept them
        coerced = _positive(value, f"numeric.tolerances.{name}", errors)
        if coerced is not None:
            tolerances[name] = coerced

    if experiment == "pdx-momentum" and omega is not None and omega <= 0:
        errors.append("pdx-momentum requires params.omega > 0")
    if experiment == "crossing-distribution" and not windows:
        errors.append("crossing-distribution requires numeric.windows")

    output = effective["output"]
    formats = list(output["formats"])
    for fmt in formats:
        if fmt not in ("json", "csv_bundle"):
            errors.append(f"output.formats: unknown format {fmt!r}")

    if errors:
        raise ConfigError(errors)

    return RunConfig(
        experiment=experiment,
        grid=grid,
        params=params,
        potential=potential,
        region=region,
        region_basis=region_basis,
        times=times,
        quadrature=quadrature,
        n_slices=n_slices,
        smearing=dict(numeric["smearing"]),
        zeno_k=zeno_k,
        windows=windows,
        tolerances=tolerances,
        output_dir=str(output["dir"]),
        output_formats=formats,
        effective=effective,
    )


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply `--set dotted.key=value` pairs onto a raw config mapping."""
    out = copy.deepcopy(raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError([f"override {item!r} is not of the form key=value"])
        dotted, _, text = item.partition("=")
        value = yaml.safe_load(text)
        target = out
        parts = dotted.split(".")
        for part in parts[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ConfigError([f"override {dotted!r} crosses a non-mapping"])
        target[parts[-1]] = value
    return out
