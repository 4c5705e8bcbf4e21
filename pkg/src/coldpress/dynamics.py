"""Time integration of the coupled temperature/strain/phase system.

The closed system for (theta, U, chi) is

    c theta_t - kappa Lap(theta)
        = nu U_t^2 - beta theta U_t - (alpha lam (U - alpha(1-chi)) + L) chi_t
    nu U_t + lam U
        = alpha lam (1-chi) + beta (theta - theta_c) - p0 - K_Gamma U_Omega(t)
    gamma chi_t + alpha lam (U - alpha(1-chi)) + L (1 - theta/theta_c)
        + dI(chi) contains 0

with U_Omega(t) the volume integral of U and dI the subdifferential of
the indicator of [0, 1].  A step is split into

  1. an implicit-Euler resolvent for (U, chi) at a given temperature
     iterate theta_hat: per cell a clamped 2x2 linear solve, coupled
     globally through the scalar U_Omega, which is resolved by a
     safeguarded-Newton root find on a monotone decreasing function;
  2. an implicit heat step whose source uses the equivalent form

         nu U_t^2 + gamma chi_t^2 - (beta U_t + (L/theta_c) chi_t) theta,

     valid whenever the phase inclusion holds (the resolvent enforces
     it), with the theta-proportional part folded into the diagonal
     where it acts as a sink and frozen at theta_old where it acts as a
     source, so the matrix stays an M-matrix and positivity of theta is
     unconditional.

In staggered mode theta_hat is theta_old (one sweep); picard mode
iterates the pair of substeps with theta_hat the latest temperature
until the iterates settle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import diagnostics
from .diffusion import SolverError, diffusion_solve
from .grid import Field, Grid, RobinData, integrate
from .materials import BoundaryParams, MaterialParams


class PicardDiverged(SolverError):
    """The fixed-point temperature iteration hit its cap."""


class RootFindError(SolverError):
    """The scalar root find for U_Omega failed; dt is likely too large."""


@dataclass(frozen=True)
class State:
    """Discrete fields at one instant, immutable."""

    theta: Field
    U: Field
    chi: Field
    t: float

    def __post_init__(self):
        grid = self.theta.grid
        if self.U.grid != grid or self.chi.grid != grid:
            raise ValueError("state fields must share one grid")
        if self.theta.min() <= 0.0:
            raise ValueError("theta must be strictly positive cellwise")
        if self.chi.min() < 0.0 or self.chi.max() > 1.0:
            raise ValueError("chi must lie in [0, 1] cellwise")

    @property
    def grid(self) -> Grid:
        return self.theta.grid


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    mode: str = "staggered"            # staggered | picard
    picard_tol: float = 1.0e-8         # relative L2 change of theta
    picard_max: int = 50
    truncation_R: float = math.inf     # temperature cutoff, disabled by default
    scalar_root_tol: float = 1.0e-12

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        if self.mode not in ("staggered", "picard"):
            raise ValueError(f"mode must be 'staggered' or 'picard', got {self.mode!r}")
        if not (self.picard_tol > 0.0 and self.scalar_root_tol > 0.0):
            raise ValueError("tolerances must be > 0")


@dataclass(frozen=True)
class StepReport:
    picard_iterations: int
    max_update_theta: float
    max_update_U: float
    max_update_chi: float
    U_Omega_new: float
    rate_norm: float                   # L2 norm of (U_t, chi_t)


def _truncate(theta_hat: np.ndarray, R: float) -> np.ndarray:
    """Cutoff Q_R(z) = min(max(z, 0), R)."""
    if math.isinf(R):
        return theta_hat
    return np.minimum(np.maximum(theta_hat, 0.0), R)


def resolvent_step_phase(theta_hat: Field, U_old: Field, chi_old: Field,
                         dt: float, m: MaterialParams, b: BoundaryParams,
                         *, root_tol: float = 1.0e-12,
                         truncation_R: float = math.inf,
                         max_iter: int = 200,
                         W0: float | None = None) -> tuple[Field, Field, float]:
    """Implicit-Euler update of (U, chi) at frozen temperature theta_hat.

    Returns (U_new, chi_new, U_Omega_new) satisfying cell by cell

        nu (U_new - U_old)/dt + lam U_new
            = alpha lam (1 - chi_new) + beta (theta_hat - theta_c)
              - p0 - K_Gamma U_Omega_new
        gamma (chi_new - chi_old)/dt + alpha lam (U_new - alpha(1-chi_new))
            + L (1 - theta_hat/theta_c) + dI(chi_new) contains 0

    with U_Omega_new = integrate(U_new) and chi_new clamped to [0, 1]
    exactly (the projection realizes the subdifferential).

    The per-cell solve eliminates U, clamps the reduced chi equation, and
    closes the nonlocal scalar by a bracketed Newton iteration on
    G(W) = integrate(U_new(W)) - W, which is piecewise affine and
    strictly decreasing with slope <= -1.
    """
    grid = theta_hat.grid
    th = _truncate(theta_hat.values, truncation_R)
    if np.any(th <= 0.0):
        raise ValueError("theta_hat must be positive cellwise")
    Uo = U_old.values
    xo = chi_old.values

    a = m.nu / dt
    g = m.gamma / dt
    al = m.alpha * m.lam
    aplam = a + m.lam
    # coefficient of chi after eliminating U; strictly positive
    A_chi = g + m.alpha ** 2 * m.lam * a / aplam

    r1_base = a * Uo + al + m.beta * (th - m.theta_c) - b.p0
    r2 = g * xo + m.alpha ** 2 * m.lam - m.L * (1.0 - th / m.theta_c)
    V = grid.cell_volume
    KG = b.K_Gamma

    def solve_cells(W: float):
        r1 = r1_base - KG * W
        z = (r2 - al * r1 / aplam) / A_chi
        chi = np.clip(z, 0.0, 1.0)
        U = (r1 - al * chi) / aplam
        return U, chi, z

    if KG == 0.0:
        U, chi, _ = solve_cells(0.0)
        W = float(U.sum()) * V
        return Field(grid, U), Field(grid, chi), W

    sumr1 = float(r1_base.sum()) * V
    vol = grid.volume
    denom = aplam + KG * vol
    W_lo = (sumr1 - al * vol) / denom   # G >= 0 here (all chi at 1)
    W_hi = sumr1 / denom                # G <= 0 here (all chi at 0)

    # dchi/dW on unclamped cells; dU/dW follows from the eliminated row
    dchi_dW = al * KG / (aplam * A_chi)

    def G_and_slope(W: float):
        U, chi, z = solve_cells(W)
        free = (z > 0.0) & (z < 1.0)
        dU_dW = (-KG - al * dchi_dW * free) / aplam
        G = float(U.sum()) * V - W
        slope = float(dU_dW.sum()) * V - 1.0
        return G, slope, U, chi

    # warm start (e.g. the previous volume increment) clipped into the bracket
    W = 0.5 * (W_lo + W_hi) if W0 is None else min(max(W0, W_lo), W_hi)
    scale = max(1.0, abs(W_hi), abs(W_lo))
    for _ in range(max_iter):
        G, slope, U, chi = G_and_slope(W)
        if abs(G) <= root_tol * scale:
            return Field(grid, U), Field(grid, chi), W
        if G > 0.0:
            W_lo = max(W_lo, W)
        else:
            W_hi = min(W_hi, W)
        W_newton = W - G / slope
        if W_lo < W_newton < W_hi:
            W = W_newton
        else:
            W = 0.5 * (W_lo + W_hi)
        if W_hi - W_lo <= 1.0e-16 * scale:
            G, _, U, chi = G_and_slope(W)
            if abs(G) <= max(root_tol, 1.0e-12) * scale:
                return Field(grid, U), Field(grid, chi), W
            break
    raise RootFindError(
        "U_Omega root find did not converge; reduce dt or check parameters")


def heat_step(state_old: State, U_new: Field, chi_new: Field, dt: float,
              m: MaterialParams, b: BoundaryParams, cfg: SolverConfig,
              theta_hat: Field | None = None) -> Field:
    """Implicit heat-conduction step driven by this step's phase rates.

    Builds U_t and chi_t as backward differences, assembles the source

        nu U_t^2 + gamma chi_t^2 - (beta U_t + (L/theta_c) chi_t) * theta

    and calls the diffusion solve.  In the default mode the
    theta-proportional coefficient d = beta U_t + (L/theta_c) chi_t is
    implicit where d >= 0 (a sink) and explicit at theta_old where d < 0
    (latent-heat release), keeping the right side nonnegative; theta_new
    is then positive for any dt.  With a finite truncation cutoff the
    theta terms are instead evaluated explicitly at Q_R(theta_hat).
    """
    grid = state_old.grid
    robin = RobinData(b.h_faces, b.theta_Gamma).for_grid(grid)
    U_t = (U_new.values - state_old.U.values) / dt
    chi_t = (chi_new.values - state_old.chi.values) / dt
    dissipation = m.nu * U_t ** 2 + m.gamma * chi_t ** 2
    coeff = m.beta * U_t + (m.L / m.theta_c) * chi_t

    if math.isinf(cfg.truncation_R):
        reaction = np.maximum(coeff, 0.0)
        source = dissipation + np.maximum(-coeff, 0.0) * state_old.theta.values
    else:
        th = theta_hat.values if theta_hat is not None else state_old.theta.values
        source = dissipation - coeff * _truncate(th, cfg.truncation_R)
        reaction = None

    return diffusion_solve(state_old.theta, Field(grid, source), dt,
                           m.c, m.kappa, robin, reaction=reaction)


def _advance(state: State, theta_hat: Field, dt: float, m: MaterialParams,
             b: BoundaryParams, cfg: SolverConfig):
    U_new, chi_new, W = resolvent_step_phase(
        theta_hat, state.U, state.chi, dt, m, b,
        root_tol=cfg.scalar_root_tol, truncation_R=cfg.truncation_R,
        W0=integrate(state.U))
    theta_new = heat_step(state, U_new, chi_new, dt, m, b, cfg,
                          theta_hat=theta_hat)
    return theta_new, U_new, chi_new, W


def step(state: State, m: MaterialParams, b: BoundaryParams,
         cfg: SolverConfig) -> tuple[State, StepReport]:
    """Advance one time step of length cfg.dt.

    staggered: one resolvent sweep at theta_hat = theta_old, then one
    heat step.  picard: iterate the sweep with theta_hat the latest
    temperature until successive iterates differ by at most picard_tol
    in relative L2, raising PicardDiverged at the iteration cap.
    """
    dt = cfg.dt
    if cfg.mode == "staggered":
        theta_new, U_new, chi_new, W = _advance(state, state.theta, dt, m, b, cfg)
        iterations = 1
    else:
        theta_hat = state.theta
        iterations = 0
        prev_res = math.inf
        while True:
            theta_new, U_new, chi_new, W = _advance(state, theta_hat, dt, m, b, cfg)
            iterations += 1
            num = float(np.linalg.norm(theta_new.values - theta_hat.values))
            den = max(float(np.linalg.norm(theta_new.values)), 1.0e-300)
            res = num / den
            if res <= cfg.picard_tol:
                break
            if iterations >= cfg.picard_max:
                trend = "growing" if res > prev_res else "stalled"
                raise PicardDiverged(
                    f"picard iteration {trend} at residual {res:.3e} "
                    f"after {iterations} iterations (t = {state.t:g})")
            prev_res = res
            theta_hat = theta_new

    grid = state.grid
    U_t = (U_new.values - state.U.values) / dt
    chi_t = (chi_new.values - state.chi.values) / dt
    rate_norm = math.sqrt(float(np.sum(U_t ** 2 + chi_t ** 2)) * grid.cell_volume)
    report = StepReport(
        picard_iterations=iterations,
        max_update_theta=float(np.max(np.abs(theta_new.values - state.theta.values))),
        max_update_U=float(np.max(np.abs(U_new.values - state.U.values))),
        max_update_chi=float(np.max(np.abs(chi_new.values - state.chi.values))),
        U_Omega_new=W,
        rate_norm=rate_norm,
    )
    new_state = State(theta=theta_new, U=U_new, chi=chi_new, t=state.t + dt)
    return new_state, report


def run(state0: State, m: MaterialParams, b: BoundaryParams, cfg: SolverConfig,
        t_end: float, observers=(),
        steady_rate_tol: float | None = None,
        steady_grad_tol: float | None = None):
    """March from state0 to t_end, collecting one diagnostics record per
    step (plus the initial record).

    Observers are callables (state, record) invoked after every record.
    When both steady tolerances are given, the run stops early once the
    combined rate norm of (U_t, chi_t) and the L2 norm of grad(theta)
    fall below them.  Returns (records, final_state).
    """
    if not t_end > state0.t:
        raise ValueError("t_end must exceed the initial time")
    records = [diagnostics.build_record(state0, m, b)]
    for obs in observers:
        obs(state0, records[0])

    state = state0
    n_steps = int(round((t_end - state0.t) / cfg.dt))
    for _ in range(n_steps):
        try:
            new_state, report = step(state, m, b, cfg)
        except (SolverError, ValueError) as err:
            failure = SolverError(f"step failed at t = {state.t:g}: {err}")
            failure.partial_records = records
            raise failure from err
        record = diagnostics.build_record(
            new_state, m, b, prev_state=state, prev_record=records[-1],
            rate_norm=report.rate_norm)
        records.append(record)
        for obs in observers:
            obs(new_state, record)
        state = new_state
        if steady_rate_tol is not None and steady_grad_tol is not None:
            grad = math.sqrt(state.grid.grad_sq_integral(state.theta.values))
            if report.rate_norm <= steady_rate_tol and grad <= steady_grad_tol:
                break
    return records, state
