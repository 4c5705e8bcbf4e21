"""Solidification of a liquid in an elastic container.

A finite-volume simulator for the coupled temperature/strain/phase
system with a nonlocal pressure coupling, together with a closed-form
equilibrium analyzer and a thermodynamic-consistency diagnostics suite.
"""

from .constitutive import (boundary_energy, clausius_clapeyron_slope,
                           dimensionless_groups, entropy_density,
                           free_energy_density, internal_energy_density,
                           pressure_deviation)
from .diagnostics import DiagnosticsRecord, envelope_check, lyapunov, totals
from .diffusion import SolverError, diffusion_solve
from .dynamics import (PicardDiverged, SolverConfig, State, StepReport,
                       heat_step, resolvent_step_phase, run, step)
from .equilibria import (EquilibriumReport, Regime, classify,
                         limit_behaviors, thresholds)
from .grid import Field, Grid, RobinData, boundary_integrate, integrate
from .materials import (NORMALIZED, PRESETS, WATER, BoundaryParams,
                        DimensionlessGroups, MaterialParams, Preset,
                        get_preset)

__version__ = "0.1.0"

__all__ = [
    "BoundaryParams", "DiagnosticsRecord", "DimensionlessGroups",
    "EquilibriumReport", "Field", "Grid", "MaterialParams", "NORMALIZED",
    "PRESETS", "PicardDiverged", "Preset", "Regime", "RobinData",
    "SolverConfig", "SolverError", "State", "StepReport", "WATER",
    "boundary_energy", "boundary_integrate", "classify",
    "clausius_clapeyron_slope", "diffusion_solve", "dimensionless_groups",
    "entropy_density", "envelope_check", "free_energy_density", "get_preset",
    "heat_step", "integrate", "internal_energy_density", "limit_behaviors",
    "lyapunov", "pressure_deviation", "resolvent_step_phase", "run", "step",
    "thresholds", "totals",
]
