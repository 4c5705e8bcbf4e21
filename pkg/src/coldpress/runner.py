"""Run orchestration and file output.

Executes a scenario, writes the diagnostics time series (CSV, 17
significant digits), optional per-cell snapshots, a plain-text summary
comparing the final state against the equilibrium prediction, and the
report figures.  Output bytes depend only on the configuration: fixed
iteration orders, no time-seeded randomness, no timestamps.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import dynamics
from .config import ConfigError, ScenarioConfig
from .diagnostics import CSV_COLUMNS, DiagnosticsRecord
from .diffusion import SolverError
from .dynamics import State
from .equilibria import (ClassificationError, EquilibriumReport, classify,
                         groups_for)
from .grid import Field, Grid
WORKERS_ENV = "COLDPRESS_WORKERS"

SWEEP_COLUMNS = ("value", "theta_liquid", "theta_solid", "regime",
                 "X_frac_predicted", "X_frac_simulated",
                 "U_Omega_predicted", "U_Omega_simulated",
                 "P_gauge_predicted", "P_gauge_simulated", "status")

REFINEMENT_COLUMNS = ("level", "dt", "steps", "X_Omega_final", "U_Omega_final",
                      "P_gauge_final", "rms_energy_residual",
                      "rms_residual_ratio")


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(path: Path, columns, rows) -> None:
    lines = [",".join(columns)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_timeseries(path: Path, records, every: int = 1) -> None:
    rows = [r.row() for i, r in enumerate(records)
            if i % every == 0 or i == len(records) - 1]
    write_csv(path, CSV_COLUMNS, rows)


def snapshot_rows(grid: Grid, state: State):
    centers = grid.cell_centers()
    for i in range(grid.n_cells):
        yield (i, *centers[i], state.theta.values[i], state.U.values[i],
               state.chi.values[i])


def write_snapshot(path: Path, state: State) -> None:
    grid = state.grid
    coord_names = ("x", "y", "z")[:grid.dim]
    write_csv(path, ("index", *coord_names, "theta", "U", "chi"),
              snapshot_rows(grid, state))


@dataclass
class RunOutput:
    config: ScenarioConfig
    records: list[DiagnosticsRecord]
    final_state: State | None
    equilibrium: EquilibriumReport | None
    summary: dict
    paths: dict[str, Path]


def _initial_state(cfg: ScenarioConfig) -> State:
    theta, U, chi = cfg.initial_fields()
    g = cfg.grid
    return State(theta=Field(g, theta), U=Field(g, U), chi=Field(g, chi), t=0.0)


def _predict(cfg: ScenarioConfig) -> EquilibriumReport | None:
    try:
        groups = groups_for(cfg.material, cfg.boundary, cfg.grid.volume)
        return classify(cfg.boundary.theta_Gamma, groups, cfg.material,
                        cfg.boundary, cfg.grid.volume)
    except ClassificationError:
        return None


def _summary_lines(summary: dict) -> str:
    return "".join(f"{key} = {_fmt(value)}\n" for key, value in summary.items())


def run_scenario(cfg: ScenarioConfig, out_dir: Path | None = None,
                 mode: str | None = None, plots: bool = True) -> RunOutput:
    """Execute one scenario and write its output files.

    On solver failure the summary (with the failing time) and the partial
    time series are still written before the error propagates.
    """
    if mode is not None:
        cfg = replace(cfg, solver=replace(cfg.solver, mode=mode))
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    state0 = _initial_state(cfg)
    prediction = _predict(cfg)
    paths: dict[str, Path] = {}

    observers = []
    snap_counter = {"n": 0}
    if out is not None and cfg.snapshot_every > 0:
        snap_dir = out / "snapshots"
        snap_dir.mkdir(exist_ok=True)

        def snapshot_observer(state, record):
            if snap_counter["n"] % cfg.snapshot_every == 0:
                path = snap_dir / f"snapshot_{snap_counter['n']:08d}.csv"
                write_snapshot(path, state)
                paths[f"snapshot_{snap_counter['n']}"] = path
            snap_counter["n"] += 1

        observers.append(snapshot_observer)

    steady = cfg.steady_tol
    failure: SolverError | None = None
    try:
        records, final_state = dynamics.run(
            state0, cfg.material, cfg.boundary, cfg.solver, cfg.t_end,
            observers=observers,
            steady_rate_tol=steady, steady_grad_tol=steady)
    except SolverError as exc:
        failure = exc
        records = list(getattr(exc, "partial_records", []) or [])
        final_state = None

    summary: dict = {"scenario": cfg.name, "mode": cfg.solver.mode,
                     "dt": cfg.solver.dt}
    if failure is not None:
        summary["status"] = "failed"
        summary["error"] = str(failure)
        if records:
            summary["failed_at_t"] = records[-1].t
    else:
        last = records[-1]
        summary.update({
            "status": "completed",
            "t_final": last.t,
            "steps": len(records) - 1,
            "theta_min_final": last.theta_min,
            "theta_max_final": last.theta_max,
            "X_Omega_final": last.X_Omega,
            "U_Omega_final": last.U_Omega,
            "P_gauge_final": last.P_gauge,
            "Psi_final": last.Psi,
            "rate_norm_final": last.rate_norm,
        })
        if prediction is not None:
            vol = cfg.grid.volume
            summary.update({
                "regime_predicted": prediction.regime.value,
                "theta_liquid": prediction.theta_liquid,
                "theta_solid": prediction.theta_solid,
                "X_Omega_predicted": prediction.X_Omega_inf,
                "U_Omega_predicted": prediction.U_Omega_inf,
                "P_gauge_predicted": prediction.P_inf,
                "abs_err_X_frac": abs(last.X_Omega - prediction.X_Omega_inf) / vol,
                "abs_err_U_Omega": abs(last.U_Omega - prediction.U_Omega_inf),
                "abs_err_P_gauge": abs(last.P_gauge - prediction.P_inf),
            })
        else:
            summary["regime_predicted"] = "unclassified"

    if out is not None:
        if records:
            paths["timeseries"] = out / "timeseries.csv"
            write_timeseries(paths["timeseries"], records, cfg.output_every)
        paths["summary"] = out / "summary.txt"
        paths["summary"].write_text(_summary_lines(summary), encoding="utf-8")
        if plots and records and failure is None:
            from . import plots as plotmod
            paths.update(plotmod.render_run_figures(out, records, prediction,
                                                    cfg.grid.volume))

    if failure is not None:
        raise failure
    return RunOutput(config=cfg, records=records, final_state=final_state,
                     equilibrium=prediction, summary=summary, paths=paths)


def _sweep_row(cfg: ScenarioConfig, value: float):
    if cfg.sweep.parameter == "theta_Gamma":
        boundary = replace(cfg.boundary, theta_Gamma=value)
    else:
        boundary = replace(cfg.boundary, K_Gamma=value)
    sub = replace(cfg, boundary=boundary, sweep=None)
    vol = sub.grid.volume
    try:
        groups = groups_for(sub.material, sub.boundary, vol)
        pred = classify(sub.boundary.theta_Gamma, groups, sub.material,
                        sub.boundary, vol)
    except ClassificationError as exc:
        return (value, math.nan, math.nan, "unclassified", math.nan, math.nan,
                math.nan, math.nan, math.nan, math.nan, f"failed: {exc}")
    try:
        result = run_scenario(sub, out_dir=None, plots=False)
        last = result.records[-1]
        return (value, pred.theta_liquid, pred.theta_solid, pred.regime.value,
                pred.X_Omega_inf / vol, last.X_Omega / vol,
                pred.U_Omega_inf, last.U_Omega,
                pred.P_inf, last.P_gauge, "ok")
    except SolverError as exc:
        return (value, pred.theta_liquid, pred.theta_solid, pred.regime.value,
                pred.X_Omega_inf / vol, math.nan, pred.U_Omega_inf, math.nan,
                pred.P_inf, math.nan, f"failed: {exc}")


def run_sweep(cfg: ScenarioConfig, out_dir: Path | None = None,
              plots: bool = True):
    """One simulated row per sweep value; per-row failures are recorded in
    the status column and the sweep continues.  Rows may be computed by
    parallel worker threads (COLDPRESS_WORKERS); output order follows the
    configured value order regardless."""
    if cfg.sweep is None or not cfg.sweep.values:
        raise ConfigError("sweep: config has no sweep section with values")
    workers = max(1, int(os.environ.get(WORKERS_ENV, "1")))
    values = cfg.sweep.values
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda v: _sweep_row(cfg, v), values))
    else:
        rows = [_sweep_row(cfg, v) for v in values]

    paths = {}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths["sweep"] = out / "sweep.csv"
        write_csv(paths["sweep"], SWEEP_COLUMNS, rows)
        if plots:
            from . import plots as plotmod
            paths.update(plotmod.render_sweep_figure(out, cfg.sweep.parameter,
                                                     rows))
    return rows, paths


def run_refinement(cfg: ScenarioConfig, out_dir: Path, levels: int,
                   plots: bool = True):
    """Rerun the scenario with dt halved `levels` times and tabulate the
    steady observables and the RMS energy residual per level."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    prev_rms = None
    for level in range(levels + 1):
        sub = replace(cfg, solver=replace(cfg.solver,
                                          dt=cfg.solver.dt / 2 ** level))
        result = run_scenario(sub, out / f"dt{level}", plots=plots)
        last = result.records[-1]
        residuals = np.array([r.energy_residual for r in result.records[1:]])
        rms = float(np.sqrt(np.mean(residuals ** 2))) if residuals.size else 0.0
        ratio = math.nan if prev_rms is None or prev_rms == 0.0 else rms / prev_rms
        rows.append((level, sub.solver.dt, len(result.records) - 1,
                     last.X_Omega, last.U_Omega, last.P_gauge, rms, ratio))
        prev_rms = rms
    path = out / "refinement.csv"
    write_csv(path, REFINEMENT_COLUMNS, rows)
    return rows, {"refinement": path}
