"""Report figures rendered next to the delimited output.

Everything draws from the already-computed diagnostics records, so the
CSV files remain the authoritative output; the figures are a quick-look
companion written by the same report path.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_DPI = 130


def _save(fig, path: Path) -> None:
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def render_run_figures(out_dir: Path, records, prediction=None,
                       volume: float = 1.0) -> dict:
    t = [r.t for r in records]
    paths = {}

    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    ax = axes[0][0]
    ax.plot(t, [r.theta_min for r in records], label="min")
    ax.plot(t, [r.theta_max for r in records], label="max")
    ax.set_ylabel("temperature")
    ax.legend(fontsize=8)
    ax = axes[0][1]
    ax.plot(t, [r.X_Omega / volume for r in records])
    if prediction is not None:
        ax.axhline(prediction.X_Omega_inf / volume, color="k", ls="--", lw=0.8)
    ax.set_ylabel("ice fraction")
    ax = axes[1][0]
    ax.plot(t, [r.U_Omega for r in records])
    if prediction is not None:
        ax.axhline(prediction.U_Omega_inf, color="k", ls="--", lw=0.8)
    ax.set_ylabel("volume increment")
    ax.set_xlabel("t")
    ax = axes[1][1]
    ax.plot(t, [r.P_gauge for r in records])
    if prediction is not None:
        ax.axhline(prediction.P_inf, color="k", ls="--", lw=0.8)
    ax.set_ylabel("gauge pressure")
    ax.set_xlabel("t")
    fig.suptitle("state observables")
    paths["fig_timeseries"] = Path(out_dir) / "timeseries.png"
    _save(fig, paths["fig_timeseries"])

    fig, axes = plt.subplots(1, 3, figsize=(11, 3.2))
    axes[0].plot(t, [r.Psi for r in records])
    axes[0].set_title("descending functional")
    axes[0].set_xlabel("t")
    axes[1].plot(t, [r.entropy_production for r in records])
    axes[1].set_title("entropy production")
    axes[1].set_xlabel("t")
    axes[2].plot(t, [abs(r.energy_residual) for r in records])
    axes[2].set_yscale("symlog", linthresh=1e-16)
    axes[2].set_title("|energy residual|")
    axes[2].set_xlabel("t")
    fig.tight_layout()
    paths["fig_thermo"] = Path(out_dir) / "thermo.png"
    _save(fig, paths["fig_thermo"])
    return paths


def render_sweep_figure(out_dir: Path, parameter: str, rows) -> dict:
    values = [row[0] for row in rows]
    predicted = [row[4] for row in rows]
    simulated = [row[5] for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(values, predicted, "k--", marker="o", label="predicted")
    ax.plot(values, simulated, marker="x", ls="", label="simulated")
    ok_rows = [row for row in rows if row[10] == "ok"]
    if ok_rows and parameter == "theta_Gamma":
        # regime thresholds are shared across the rows of a theta sweep
        ax.axvline(ok_rows[0][1], color="tab:red", lw=0.8)
        ax.axvline(ok_rows[0][2], color="tab:blue", lw=0.8)
    ax.set_xlabel(parameter)
    ax.set_ylabel("ice fraction")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(out_dir) / "sweep.png"
    _save(fig, path)
    return {"fig_sweep": path}
