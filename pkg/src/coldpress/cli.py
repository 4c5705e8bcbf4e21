"""Command line interface.

Subcommands: run (one scenario), sweep (parameter sweep table),
equilibria (closed-form analysis only), presets (list material
constants).  Exit codes: 0 success, 1 configuration or validation error,
2 solver failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .diffusion import SolverError
from .equilibria import (ClassificationError, classify, groups_for,
                         limit_behaviors)
from .materials import PRESETS, ParameterError
from .runner import run_refinement, run_scenario, run_sweep, write_csv


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coldpress",
        description="Simulate solidification of a liquid in an elastic "
                    "container and analyze its equilibria.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario and write its report")
    run_p.add_argument("--config", required=True, type=Path,
                       help="scenario YAML file")
    run_p.add_argument("--out", required=True, type=Path,
                       help="output directory")
    run_p.add_argument("--mode", choices=["staggered", "picard"],
                       help="override the configured stepping mode")
    run_p.add_argument("--dt-halve", type=int, default=0, metavar="N",
                       help="refinement harness: rerun with dt halved N times")
    run_p.add_argument("--no-plots", action="store_true",
                       help="skip figure rendering")

    sweep_p = sub.add_parser("sweep", help="simulate each value of the sweep")
    sweep_p.add_argument("--config", required=True, type=Path)
    sweep_p.add_argument("--out", required=True, type=Path)
    sweep_p.add_argument("--no-plots", action="store_true")

    eq_p = sub.add_parser("equilibria",
                          help="closed-form thresholds, regime, and limits")
    eq_p.add_argument("--config", required=True, type=Path)
    eq_p.add_argument("--out", type=Path, help="also write equilibria.csv")

    pre_p = sub.add_parser("presets", help="list material presets")
    pre_p.add_argument("name", nargs="?", help="show one preset in full")
    return parser


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.mode is not None:
        from dataclasses import replace
        cfg = replace(cfg, solver=replace(cfg.solver, mode=args.mode))
    if args.dt_halve > 0:
        rows, paths = run_refinement(cfg, args.out, args.dt_halve,
                                     plots=not args.no_plots)
        print(f"wrote {paths['refinement']}")
        return 0
    result = run_scenario(cfg, args.out, plots=not args.no_plots)
    for key in ("status", "regime_predicted", "X_Omega_final",
                "U_Omega_final", "P_gauge_final"):
        if key in result.summary:
            print(f"{key} = {result.summary[key]}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    rows, paths = run_sweep(cfg, args.out, plots=not args.no_plots)
    failed = sum(1 for row in rows if row[-1] != "ok")
    print(f"{len(rows)} rows ({failed} failed) -> {paths['sweep']}")
    return 0 if failed == 0 else 2


def _cmd_equilibria(args) -> int:
    cfg = load_config(args.config)
    m, b, volume = cfg.material, cfg.boundary, cfg.grid.volume
    g = groups_for(m, b, volume)
    print(f"d = {g.d:.6g}")
    print(f"beta_tilde = {g.beta_tilde:.6g}")
    print(f"omega = {g.omega:.6g}")
    print(f"L_beta = {g.L_beta:.6g}")
    print("chi_star =", "undefined" if g.chi_star is None else f"{g.chi_star:.6g}")
    try:
        report = classify(b.theta_Gamma, g, m, b, volume)
    except ClassificationError as exc:
        print(f"classification unavailable: {exc}")
        return 1
    print(f"theta_liquid = {report.theta_liquid:.6g}")
    print(f"theta_solid = {report.theta_solid:.6g}")
    print(f"regime = {report.regime.value}")
    chi = "nonunique" if report.chi_inf is None else f"{report.chi_inf:.6g}"
    print(f"chi_inf = {chi}")
    print(f"X_Omega_inf = {report.X_Omega_inf:.6g}")
    print(f"U_inf = {report.U_inf:.6g}")
    print(f"P_inf = {report.P_inf:.6g}")
    for row in limit_behaviors(g, m, b):
        print(f"limit[{row.label}]: U_inf = {row.U_inf:.6g}, "
              f"P_inf - p0 = {row.P_inf_minus_p0:.6g}, d = {row.d:.6g}")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / "equilibria.csv"
        write_csv(path,
                  ("theta_Gamma", "regime", "theta_liquid", "theta_solid",
                   "chi_inf", "X_Omega_inf", "U_inf", "P_inf", "d",
                   "beta_tilde", "omega", "L_beta"),
                  [(b.theta_Gamma, report.regime.value, report.theta_liquid,
                    report.theta_solid,
                    "nonunique" if report.chi_inf is None else report.chi_inf,
                    report.X_Omega_inf, report.U_inf, report.P_inf, g.d,
                    g.beta_tilde, g.omega, g.L_beta)])
        print(f"wrote {path}")
    return 0


def _cmd_presets(args) -> int:
    if args.name is not None:
        if args.name not in PRESETS:
            print(f"unknown preset {args.name!r}", file=sys.stderr)
            return 1
        preset = PRESETS[args.name]
        print(f"{preset.name}: {preset.notes}")
        m = preset.material
        for field_name in ("c", "kappa", "nu", "lam", "alpha", "beta",
                           "gamma", "L", "theta_c", "rho0"):
            print(f"  {field_name} = {getattr(m, field_name):.6g}")
        print(f"  (derived) v0 = {m.v0:.6g}")
        return 0
    for preset in PRESETS.values():
        print(f"{preset.name}: {preset.notes}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "equilibria":
            return _cmd_equilibria(args)
        return _cmd_presets(args)
    except (ConfigError, ParameterError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
