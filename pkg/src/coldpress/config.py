"""Scenario configuration: a nested YAML document, strictly validated.

Unknown keys are rejected and every error names the offending key path.
The parsed configuration can be re-emitted with all defaults filled; a
parse/emit/parse round trip yields an identical configuration.  The full
schema is documented in the README and in the bundled scenario files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import yaml

from .dynamics import SolverConfig
from .grid import Grid
from .materials import (BoundaryParams, MaterialParams, ParameterError,
                        get_preset)

_MATERIAL_KEYS = ("c", "kappa", "nu", "lambda", "alpha", "beta", "gamma",
                  "L", "theta_c", "rho0")
_PROFILE_KINDS = ("constant", "cosine", "linear")


class ConfigError(ValueError):
    """A scenario document failed to parse or validate."""


@dataclass(frozen=True)
class ProfileSpec:
    """Initial-condition profile along the first axis.

    constant: value; cosine: base + amplitude * cos(pi x / Lx);
    linear: base + slope * x.
    """

    kind: str
    value: float = 0.0
    base: float = 0.0
    amplitude: float = 0.0
    slope: float = 0.0

    def evaluate(self, grid: Grid) -> np.ndarray:
        x = grid.cell_centers()[:, 0]
        if self.kind == "constant":
            return np.full(grid.n_cells, self.value)
        if self.kind == "cosine":
            return self.base + self.amplitude * np.cos(math.pi * x / grid.extent[0])
        return self.base + self.slope * x

    def to_mapping(self):
        if self.kind == "constant":
            return self.value
        if self.kind == "cosine":
            return {"profile": "cosine", "base": self.base,
                    "amplitude": self.amplitude}
        return {"profile": "linear", "base": self.base, "slope": self.slope}


@dataclass(frozen=True)
class SweepSpec:
    parameter: str               # theta_Gamma | K_Gamma
    values: tuple[float, ...]


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    preset: str | None
    overrides: tuple[tuple[str, float], ...]
    material: MaterialParams
    boundary: BoundaryParams
    grid: Grid
    theta0: ProfileSpec
    U0: ProfileSpec
    chi0: ProfileSpec
    solver: SolverConfig
    t_end: float
    output_every: int
    snapshot_every: int
    steady_tol: float | None
    sweep: SweepSpec | None

    def initial_fields(self):
        """(theta0, U0, chi0) arrays, validated against the admissibility
        constraints: positive bounded temperature, phase in [0, 1]."""
        theta = self.theta0.evaluate(self.grid)
        U = self.U0.evaluate(self.grid)
        chi = self.chi0.evaluate(self.grid)
        if not np.all(np.isfinite(theta)) or np.any(theta <= 0.0):
            raise ConfigError("initial.theta0: values must be finite and > 0")
        if np.any(chi < 0.0) or np.any(chi > 1.0):
            raise ConfigError("initial.chi0: chi0 in [0,1] violated")
        return theta, U, chi


def _err(path: str, msg: str) -> ConfigError:
    return ConfigError(f"{path}: {msg}")


def _as_mapping(node, path: str) -> dict:
    if node is None:
        return {}
    if not isinstance(node, dict):
        raise _err(path, f"expected a mapping, got {type(node).__name__}")
    return node


def _reject_unknown(node: dict, allowed, path: str) -> None:
    for key in node:
        if key not in allowed:
            raise _err(f"{path}.{key}" if path else str(key), "unknown key")


def _get_number(node: dict, key: str, path: str, default=None, *,
                required=False, minimum=None, strict_min=None):
    if key not in node or node[key] is None:
        if required:
            raise _err(f"{path}.{key}", "required key is missing")
        return default
    value = node[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _err(f"{path}.{key}", f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise _err(f"{path}.{key}", "must be finite")
    if minimum is not None and value < minimum:
        raise _err(f"{path}.{key}", f"must be >= {minimum}")
    if strict_min is not None and value <= strict_min:
        raise _err(f"{path}.{key}", f"must be > {strict_min}")
    return value


def _get_int(node: dict, key: str, path: str, default=None, *,
             required=False, minimum=None):
    if key not in node or node[key] is None:
        if required:
            raise _err(f"{path}.{key}", "required key is missing")
        return default
    value = node[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise _err(f"{path}.{key}", f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise _err(f"{path}.{key}", f"must be >= {minimum}")
    return value


def _parse_profile(node, path: str) -> ProfileSpec:
    if isinstance(node, (int, float)) and not isinstance(node, bool):
        return ProfileSpec(kind="constant", value=float(node))
    node = _as_mapping(node, path)
    kind = node.get("profile")
    if kind not in _PROFILE_KINDS:
        raise _err(f"{path}.profile", f"expected one of {_PROFILE_KINDS}, got {kind!r}")
    if kind == "constant":
        _reject_unknown(node, {"profile", "value"}, path)
        return ProfileSpec(kind="constant",
                           value=_get_number(node, "value", path, required=True))
    if kind == "cosine":
        _reject_unknown(node, {"profile", "base", "amplitude"}, path)
        return ProfileSpec(kind="cosine",
                           base=_get_number(node, "base", path, required=True),
                           amplitude=_get_number(node, "amplitude", path, default=0.0))
    _reject_unknown(node, {"profile", "base", "slope"}, path)
    return ProfileSpec(kind="linear",
                       base=_get_number(node, "base", path, required=True),
                       slope=_get_number(node, "slope", path, default=0.0))


def _parse_material(doc: dict):
    preset_name = doc.get("preset")
    material_node = doc.get("material")
    if (preset_name is None) == (material_node is None):
        raise ConfigError("exactly one of 'preset' or 'material' must be given")
    overrides: tuple[tuple[str, float], ...] = ()
    if preset_name is not None:
        if not isinstance(preset_name, str):
            raise _err("preset", f"expected a preset name, got {preset_name!r}")
        try:
            preset = get_preset(preset_name)
        except ParameterError as exc:
            raise _err("preset", str(exc)) from None
        material = preset.material
        node = _as_mapping(doc.get("overrides"), "overrides")
        _reject_unknown(node, set(_MATERIAL_KEYS), "overrides")
        if node:
            pairs = []
            for key in _MATERIAL_KEYS:
                if key in node:
                    pairs.append((key, _get_number(node, key, "overrides",
                                                   required=True)))
            overrides = tuple(pairs)
            fields = {("lam" if k == "lambda" else k): v for k, v in overrides}
            try:
                material = replace(material, **fields)
            except ParameterError as exc:
                raise _err("overrides", str(exc)) from None
        return preset_name, overrides, material
    node = _as_mapping(material_node, "material")
    _reject_unknown(node, set(_MATERIAL_KEYS), "material")
    values = {}
    for key in _MATERIAL_KEYS:
        values["lam" if key == "lambda" else key] = _get_number(
            node, key, "material", required=True)
    try:
        return None, (), MaterialParams(**values)
    except ParameterError as exc:
        raise _err("material", str(exc)) from None


def _parse_grid(doc: dict) -> Grid:
    node = _as_mapping(doc.get("grid"), "grid")
    _reject_unknown(node, {"dim", "cells", "extent"}, "grid")
    dim = _get_int(node, "dim", "grid", required=True, minimum=1)
    if dim > 3:
        raise _err("grid.dim", "must be 1, 2, or 3")

    def listify(key):
        value = node.get(key)
        if value is None:
            raise _err(f"grid.{key}", "required key is missing")
        if not isinstance(value, list):
            value = [value] * dim
        if len(value) != dim:
            raise _err(f"grid.{key}", f"expected {dim} entries, got {len(value)}")
        return value

    cells = []
    for i, v in enumerate(listify("cells")):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise _err("grid.cells", f"entry {i} must be a positive integer")
        cells.append(v)
    extent = []
    for i, v in enumerate(listify("extent")):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
            raise _err("grid.extent", f"entry {i} must be a positive number")
        extent.append(float(v))
    return Grid(shape=tuple(cells), extent=tuple(extent))


def _parse_boundary(doc: dict, grid: Grid) -> BoundaryParams:
    node = _as_mapping(doc.get("boundary"), "boundary")
    if not node:
        raise ConfigError("boundary: required section is missing")
    _reject_unknown(node, {"K_Gamma", "h", "theta_Gamma", "p0", "P_stand"},
                    "boundary")
    K = _get_number(node, "K_Gamma", "boundary", required=True, minimum=0.0)
    theta_Gamma = _get_number(node, "theta_Gamma", "boundary", required=True,
                              strict_min=0.0)
    p0 = _get_number(node, "p0", "boundary", default=0.0)
    P_stand = _get_number(node, "P_stand", "boundary", default=1.0e5)
    h = node.get("h")
    if h is None:
        raise _err("boundary.h", "required key is missing")
    if not isinstance(h, list):
        h = [h] * grid.n_sides
    if len(h) != grid.n_sides:
        raise _err("boundary.h",
                   f"expected {grid.n_sides} per-face values for a "
                   f"{grid.dim}D grid, got {len(h)}")
    faces = []
    for i, v in enumerate(h):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v < 0:
            raise _err("boundary.h", f"entry {i} must be a number >= 0")
        faces.append(float(v))
    if not any(f > 0 for f in faces):
        raise _err("boundary.h", "at least one face value must be positive")
    try:
        return BoundaryParams(K_Gamma=K, h_faces=tuple(faces),
                              theta_Gamma=theta_Gamma, p0=p0, P_stand=P_stand)
    except ParameterError as exc:
        raise _err("boundary", str(exc)) from None


def _parse_solver(doc: dict) -> SolverConfig:
    node = _as_mapping(doc.get("solver"), "solver")
    _reject_unknown(node, {"dt", "mode", "picard_tol", "picard_max",
                           "truncation_R", "scalar_root_tol"}, "solver")
    dt = _get_number(node, "dt", "solver", required=True, strict_min=0.0)
    mode = node.get("mode", "staggered")
    if mode not in ("staggered", "picard"):
        raise _err("solver.mode", f"expected 'staggered' or 'picard', got {mode!r}")
    trunc = _get_number(node, "truncation_R", "solver", default=None,
                        strict_min=0.0)
    return SolverConfig(
        dt=dt, mode=mode,
        picard_tol=_get_number(node, "picard_tol", "solver", default=1.0e-8,
                               strict_min=0.0),
        picard_max=_get_int(node, "picard_max", "solver", default=50, minimum=1),
        truncation_R=math.inf if trunc is None else trunc,
        scalar_root_tol=_get_number(node, "scalar_root_tol", "solver",
                                    default=1.0e-12, strict_min=0.0),
    )


def _parse_sweep(doc: dict) -> SweepSpec | None:
    if "sweep" not in doc or doc["sweep"] is None:
        return None
    node = _as_mapping(doc["sweep"], "sweep")
    _reject_unknown(node, {"parameter", "values"}, "sweep")
    parameter = node.get("parameter")
    if parameter not in ("theta_Gamma", "K_Gamma"):
        raise _err("sweep.parameter",
                   f"expected 'theta_Gamma' or 'K_Gamma', got {parameter!r}")
    values = node.get("values")
    if not isinstance(values, list) or not values:
        raise _err("sweep.values", "expected a non-empty list of numbers")
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)) \
                or not math.isfinite(float(v)):
            raise _err("sweep.values", f"entry {i} must be a finite number")
        if parameter == "theta_Gamma" and not v > 0:
            raise _err("sweep.values", f"entry {i}: theta_Gamma must be > 0")
        if parameter == "K_Gamma" and v < 0:
            raise _err("sweep.values", f"entry {i}: K_Gamma must be >= 0")
        out.append(float(v))
    return SweepSpec(parameter=parameter, values=tuple(out))


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a scenario document.

    Raises ConfigError with the offending key path for unknown keys,
    missing required keys, type errors, and constraint violations.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"not a valid YAML document: {exc}") from None
    doc = _as_mapping(doc, "<document>")
    _reject_unknown(doc, {"name", "preset", "material", "overrides",
                          "boundary", "grid", "initial", "solver", "run",
                          "sweep"}, "")

    name = doc.get("name", "scenario")
    if not isinstance(name, str) or not name:
        raise _err("name", "expected a non-empty string")

    preset_name, overrides, material = _parse_material(doc)
    grid = _parse_grid(doc)
    boundary = _parse_boundary(doc, grid)

    initial = _as_mapping(doc.get("initial"), "initial")
    if not initial:
        raise ConfigError("initial: required section is missing")
    _reject_unknown(initial, {"theta0", "U0", "chi0"}, "initial")
    if "theta0" not in initial:
        raise _err("initial.theta0", "required key is missing")
    theta0 = _parse_profile(initial["theta0"], "initial.theta0")
    U0 = _parse_profile(initial.get("U0", 0.0), "initial.U0")
    chi0 = _parse_profile(initial.get("chi0", 1.0), "initial.chi0")

    solver = _parse_solver(doc)

    run_node = _as_mapping(doc.get("run"), "run")
    if not run_node:
        raise ConfigError("run: required section is missing")
    _reject_unknown(run_node, {"t_end", "output_every", "snapshot_every",
                               "steady_tol"}, "run")
    t_end = _get_number(run_node, "t_end", "run", required=True, strict_min=0.0)

    cfg = ScenarioConfig(
        name=name, preset=preset_name, overrides=overrides, material=material,
        boundary=boundary, grid=grid, theta0=theta0, U0=U0, chi0=chi0,
        solver=solver, t_end=t_end,
        output_every=_get_int(run_node, "output_every", "run", default=1, minimum=1),
        snapshot_every=_get_int(run_node, "snapshot_every", "run", default=0,
                                minimum=0),
        steady_tol=_get_number(run_node, "steady_tol", "run", default=None,
                               strict_min=0.0),
        sweep=_parse_sweep(doc),
    )
    cfg.initial_fields()  # reject inadmissible initial data early
    return cfg


def emit_config(cfg: ScenarioConfig) -> str:
    """Serialize a configuration back to YAML with defaults filled in."""
    doc: dict = {"name": cfg.name}
    if cfg.preset is not None:
        doc["preset"] = cfg.preset
        if cfg.overrides:
            doc["overrides"] = {k: v for k, v in cfg.overrides}
    else:
        m = cfg.material
        doc["material"] = {"c": m.c, "kappa": m.kappa, "nu": m.nu,
                           "lambda": m.lam, "alpha": m.alpha, "beta": m.beta,
                           "gamma": m.gamma, "L": m.L, "theta_c": m.theta_c,
                           "rho0": m.rho0}
    doc["boundary"] = {"K_Gamma": cfg.boundary.K_Gamma,
                       "h": list(cfg.boundary.h_faces),
                       "theta_Gamma": cfg.boundary.theta_Gamma,
                       "p0": cfg.boundary.p0,
                       "P_stand": cfg.boundary.P_stand}
    doc["grid"] = {"dim": cfg.grid.dim, "cells": list(cfg.grid.shape),
                   "extent": list(cfg.grid.extent)}
    doc["initial"] = {"theta0": cfg.theta0.to_mapping(),
                      "U0": cfg.U0.to_mapping(),
                      "chi0": cfg.chi0.to_mapping()}
    doc["solver"] = {"dt": cfg.solver.dt, "mode": cfg.solver.mode,
                     "picard_tol": cfg.solver.picard_tol,
                     "picard_max": cfg.solver.picard_max,
                     "truncation_R": (None if math.isinf(cfg.solver.truncation_R)
                                      else cfg.solver.truncation_R),
                     "scalar_root_tol": cfg.solver.scalar_root_tol}
    doc["run"] = {"t_end": cfg.t_end, "output_every": cfg.output_every,
                  "snapshot_every": cfg.snapshot_every,
                  "steady_tol": cfg.steady_tol}
    if cfg.sweep is not None:
        doc["sweep"] = {"parameter": cfg.sweep.parameter,
                        "values": list(cfg.sweep.values)}
    return yaml.safe_dump(doc, sort_keys=False)


def load_config(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
