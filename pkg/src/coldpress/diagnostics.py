"""Per-step thermodynamic bookkeeping.

Totals (energy, entropy, boundary energy, volume increment, ice content,
gauge pressure), balance residuals, entropy production, the descending
functional Psi = E + E_Gamma - theta_Gamma * S, and positivity envelopes.

The discrete entropy production uses face-centered temperature
differences consistent with the diffusion stencil, with the squared
gradient weighted by the product of the adjacent cell temperatures, so
that the energy and entropy identities close to first order in dt.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .constitutive import (_entropy_raw, _internal_energy_raw,
                           boundary_energy)
from .grid import RobinData, boundary_heat_flux, integrate
from .materials import BoundaryParams, MaterialParams

if TYPE_CHECKING:  # pragma: no cover
    from .dynamics import State

CSV_COLUMNS = ("t", "E", "S", "E_Gamma", "Psi", "U_Omega", "X_Omega",
               "P_gauge", "entropy_production", "energy_residual",
               "theta_min", "theta_max", "rate_norm")


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    E: float                   # total internal energy, J
    S: float                   # total entropy, J/K
    E_Gamma: float             # container boundary energy, J
    Psi: float                 # E + E_Gamma - theta_Gamma * S, J
    U_Omega: float             # total volume increment, m^3
    X_Omega: float             # total ice content, m^3
    P_gauge: float             # p0 + K_Gamma * U_Omega, J/m^3
    entropy_production: float  # W/K, nonnegative by construction
    energy_residual: float     # W, discrete energy balance defect
    theta_min: float
    theta_max: float
    rate_norm: float           # L2 norm of (U_t, chi_t)
    theta_min_cell: int = -1   # argmin cell, kept out of the CSV row

    def row(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in CSV_COLUMNS)


def totals(state: "State", m: MaterialParams, b: BoundaryParams):
    """Integrated observables (E, S, E_Gamma, U_Omega, X_Omega, P_gauge)."""
    # states are validated on construction, so the raw densities suffice
    grid = state.grid
    e = _internal_energy_raw(state.theta.values, state.U.values,
                             state.chi.values, m)
    s = _entropy_raw(state.theta.values, state.U.values,
                     state.chi.values, m)
    E = m.rho0 * float(e.sum()) * grid.cell_volume
    S = m.rho0 * float(s.sum()) * grid.cell_volume
    U_Omega = integrate(state.U)
    X_Omega = float((1.0 - state.chi.values).sum()) * grid.cell_volume
    E_Gamma = boundary_energy(U_Omega, b)
    P_gauge = b.p0 + b.K_Gamma * U_Omega
    return E, S, E_Gamma, U_Omega, X_Omega, P_gauge


def lyapunov(E: float, S: float, E_Gamma: float, theta_Gamma: float) -> float:
    """Descending functional Psi = E + E_Gamma - theta_Gamma * S, J.

    Nonincreasing along trajectories with constant exterior temperature.
    """
    return E + E_Gamma - theta_Gamma * S


def energy_balance_residual(prev: DiagnosticsRecord, next: DiagnosticsRecord,
                            boundary_flux: float) -> float:
    """Discrete defect of d/dt (E + E_Gamma) = boundary heat influx, W."""
    dt = next.t - prev.t
    return ((next.E + next.E_Gamma) - (prev.E + prev.E_Gamma)) / dt - boundary_flux


def entropy_production(prev_state: "State", next_state: "State", dt: float,
                       m: MaterialParams, b: BoundaryParams) -> float:
    """Discrete volume integral of

        kappa |grad theta|^2 / theta^2 + gamma chi_t^2 / theta
            + nu U_t^2 / theta

    with gradients and rates taken from the step; a sum of nonnegative
    cell terms, hence >= 0 exactly.  Units W/K.
    """
    grid = next_state.grid
    th = next_state.theta.values
    U_t = (next_state.U.values - prev_state.U.values) / dt
    chi_t = (next_state.chi.values - prev_state.chi.values) / dt

    prod = float(np.sum((m.gamma * chi_t ** 2 + m.nu * U_t ** 2) / th)) \
        * grid.cell_volume
    for axis in range(grid.dim):
        if grid.shape[axis] < 2:
            continue
        lo, hi = grid.interior_face_pairs(axis)
        dth = th[hi] - th[lo]
        prod += m.kappa * grid.face_area(axis) / grid.spacing[axis] \
            * float(np.sum(dth ** 2 / (th[hi] * th[lo])))
    return prod


def build_record(state: "State", m: MaterialParams, b: BoundaryParams,
                 prev_state: "State | None" = None,
                 prev_record: DiagnosticsRecord | None = None,
                 rate_norm: float = 0.0) -> DiagnosticsRecord:
    """Assemble the full record for one state; with the previous state and
    record present the step-based entries (residual, production) are
    filled, otherwise they are zero (initial record)."""
    E, S, E_Gamma, U_Omega, X_Omega, P_gauge = totals(state, m, b)
    psi = lyapunov(E, S, E_Gamma, b.theta_Gamma)
    production = 0.0
    residual = 0.0
    if prev_state is not None and prev_record is not None:
        dt = state.t - prev_state.t
        robin = RobinData(b.h_faces, b.theta_Gamma).for_grid(state.grid)
        flux = boundary_heat_flux(state.grid, robin, state.theta.values)
        production = entropy_production(prev_state, state, dt, m, b)
        partial = DiagnosticsRecord(
            t=state.t, E=E, S=S, E_Gamma=E_Gamma, Psi=psi, U_Omega=U_Omega,
            X_Omega=X_Omega, P_gauge=P_gauge, entropy_production=production,
            energy_residual=0.0, theta_min=state.theta.min(),
            theta_max=state.theta.max(), rate_norm=rate_norm)
        residual = energy_balance_residual(prev_record, partial, flux)
    return DiagnosticsRecord(
        t=state.t, E=E, S=S, E_Gamma=E_Gamma, Psi=psi, U_Omega=U_Omega,
        X_Omega=X_Omega, P_gauge=P_gauge, entropy_production=production,
        energy_residual=residual, theta_min=state.theta.min(),
        theta_max=state.theta.max(), rate_norm=rate_norm,
        theta_min_cell=int(np.argmin(state.theta.values)))


def theta_floor(t: float, theta_star: float) -> float:
    """Lower temperature envelope 2 theta* / (2 + theta* t) for unit
    coefficients; valid when theta* bounds the initial and exterior
    temperatures from below."""
    return 2.0 * theta_star / (2.0 + theta_star * t)


@dataclass(frozen=True)
class EnvelopeReport:
    ok: bool
    # (t, theta_min, floor, argmin cell) per violating record
    violations: tuple[tuple[float, float, float, int], ...]
    theta_min_overall: float
    theta_max_overall: float


def envelope_check(trajectory, theta_star_low: float,
                   theta_star_high: float | None = None,
                   slack: float = 0.05) -> EnvelopeReport:
    """Check positivity and the lower temperature envelope on a recorded
    trajectory.

    theta_min(t) >= (1 - slack) * theta_floor(t, theta_star_low) is
    asserted record by record (the envelope constants assume unit
    coefficients, so enable this only for the normalized constants);
    theta_min > 0 is asserted always.  theta_star_high is accepted for
    symmetry but only recorded: the matching upper envelope has an
    unquantified growth constant.
    """
    violations = []
    t0 = trajectory[0].t
    for rec in trajectory:
        floor = (1.0 - slack) * theta_floor(rec.t - t0, theta_star_low)
        if rec.theta_min <= 0.0 or rec.theta_min < floor:
            violations.append((rec.t, rec.theta_min, floor, rec.theta_min_cell))
    return EnvelopeReport(
        ok=not violations,
        violations=tuple(violations),
        theta_min_overall=min(r.theta_min for r in trajectory),
        theta_max_overall=max(r.theta_max for r in trajectory),
    )
