"""Full time step and trajectory behavior: the scalar three-variable
oracle, positivity, fixed points, continuous dependence, descent of the
phase/strain functional, and convergence to the predicted equilibria."""

import math

import numpy as np
import pytest

from coldpress import NORMALIZED, BoundaryParams, SolverConfig, State
from coldpress.dynamics import (PicardDiverged, heat_step,
                                resolvent_step_phase, run, step)
from coldpress.equilibria import classify, groups_for
from coldpress.grid import Field, Grid

NORM = NORMALIZED.material


def make_state(grid, theta, U, chi, t=0.0):
    return State(theta=Field.constant(grid, theta) if np.isscalar(theta) else Field(grid, theta),
                 U=Field.constant(grid, U) if np.isscalar(U) else Field(grid, U),
                 chi=Field.constant(grid, chi) if np.isscalar(chi) else Field(grid, chi),
                 t=t)


# ---------------------------------------------------------------------------
# scalar three-variable oracle: the same update rules on plain floats

def scalar_resolvent(theta_hat, U_old, chi_old, dt, m, b, vol):
    """Uniform-state resolvent by explicit case analysis; W = U * vol."""
    a = m.nu / dt
    g = m.gamma / dt
    al = m.alpha * m.lam
    r1 = a * U_old + al + m.beta * (theta_hat - m.theta_c) - b.p0
    r2 = g * chi_old + m.alpha ** 2 * m.lam - m.L * (1.0 - theta_hat / m.theta_c)
    cU = m.nu / dt + m.lam + b.K_Gamma * vol   # U coefficient incl. nonlocal part

    # interior candidate
    det = cU * (g + m.alpha ** 2 * m.lam) - al * al
    chi = (cU * r2 - al * r1) / det
    if 0.0 <= chi <= 1.0:
        U = (r1 - al * chi) / cU
        return U, chi
    for chi_clamped in (0.0, 1.0):
        U = (r1 - al * chi_clamped) / cU
        xi = r2 - al * U - (g + m.alpha ** 2 * m.lam) * chi_clamped
        if (chi_clamped == 0.0 and xi <= 0.0) or (chi_clamped == 1.0 and xi >= 0.0):
            return U, chi_clamped
    raise AssertionError("no consistent clamp case")


def scalar_heat(theta_old, U_old, chi_old, U_new, chi_new, dt, m, b, vol, area_h_total):
    U_t = (U_new - U_old) / dt
    chi_t = (chi_new - chi_old) / dt
    d = m.beta * U_t + (m.L / m.theta_c) * chi_t
    src = m.nu * U_t ** 2 + m.gamma * chi_t ** 2 + max(-d, 0.0) * theta_old
    num = (m.c / dt) * theta_old + src + (area_h_total / vol) * b.theta_Gamma
    den = m.c / dt + max(d, 0.0) + area_h_total / vol
    return num / den


class TestScalarOracle:
    @pytest.mark.parametrize("cells", [1, 2])
    def test_uniform_run_matches_three_variable_recursion(self, cells):
        # symmetric grid, equal transfer on both ends: the fields stay
        # uniform and every step must reproduce the scalar recursion
        g = Grid(shape=(cells,), extent=(1.0,))
        m = NORM
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0, 1.0), theta_Gamma=0.5)
        cfg = SolverConfig(dt=1e-3)
        state = make_state(g, 1.0, 0.0, 1.0)
        vol = g.volume
        per_cell_vol = g.cell_volume
        # a single cell touches both boundary faces, two cells one each
        hA_per_cell = (2.0 if cells == 1 else 1.0) * g.face_area(0)
        th, U, chi = 1.0, 0.0, 1.0
        for _ in range(200):
            state, _ = step(state, m, b, cfg)
            U_new, chi_new = scalar_resolvent(th, U, chi, cfg.dt, m, b, vol)
            th = scalar_heat(th, U, chi, U_new, chi_new, cfg.dt, m, b,
                             per_cell_vol, hA_per_cell)
            U, chi = U_new, chi_new
            # elimination order may leave a few-ulp asymmetry that drifts
            assert np.ptp(state.theta.values) <= 1e-13 * state.theta.max()
            assert state.theta.values[0] == pytest.approx(th, rel=1e-12)
            assert state.U.values[0] == pytest.approx(U, rel=1e-12)
            assert state.chi.values[0] == pytest.approx(chi, rel=1e-12, abs=1e-15)

    def test_pure_diffusion_steady_state(self):
        g = Grid(shape=(32,), extent=(1.0,))
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0, 1.0), theta_Gamma=0.8)
        state = make_state(g, 0.8, 0.0, 1.0)
        out = heat_step(state, state.U, state.chi, 0.1, NORM, b, SolverConfig(dt=0.1))
        np.testing.assert_allclose(out.values, 0.8, rtol=0, atol=1e-13)


class TestPositivity:
    @pytest.mark.parametrize("dt", [1e-3, 1.0, 1e3])
    def test_theta_stays_positive_for_any_dt(self, dt):
        # strong freezing with latent-heat release: the theta-proportional
        # source is frozen at theta_old, so the matrix stays an M-matrix
        g = Grid(shape=(16,), extent=(1.0,))
        m = NORM
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0, 1.0), theta_Gamma=0.05)
        cfg = SolverConfig(dt=dt)
        state = make_state(g, 0.7, 0.0, 0.5)
        new_state, _ = step(state, m, b, cfg)
        assert new_state.theta.min() > 0.0

    def test_chi_bounds_after_every_step(self):
        g = Grid(shape=(16,), extent=(1.0,))
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0, 1.0), theta_Gamma=0.4)
        cfg = SolverConfig(dt=0.01)
        state = make_state(g, 1.2, 0.0, 1.0)
        for _ in range(300):
            state, _ = step(state, NORM, b, cfg)
            assert state.chi.min() >= 0.0 and state.chi.max() <= 1.0
            assert state.theta.min() > 0.0


class TestFixedPointsAndModes:
    @pytest.mark.parametrize("mode", ["staggered", "picard"])
    def test_liquid_equilibrium_is_fixed(self, mode):
        g = Grid(shape=(16,), extent=(1.0,))
        m = NORM
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0, 1.0), theta_Gamma=1.1, p0=0.0)
        # theta = theta_Gamma >= theta_c, chi = 1, U from the strain balance
        # with beta(theta - theta_c) = 0.1: U (1 + K|O|) = 0.1
        U_eq = 0.1 / 2.0
        state = make_state(g, 1.1, U_eq, 1.0)
        cfg = SolverConfig(dt=0.01, mode=mode)
        new_state, report = step(state, m, b, cfg)
        assert report.max_update_theta < 1e-9
        assert report.max_update_U < 1e-9
        assert report.max_update_chi < 1e-9

    def test_picard_iteration_count_small(self):
        # regression bound measured at first implementation
        g = Grid(shape=(32,), extent=(1.0,))
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0, 1.0), theta_Gamma=0.5)
        cfg = SolverConfig(dt=1e-3, mode="picard")
        state = make_state(g, 1.0, 0.0, 1.0)
        for _ in range(20):
            state, report = step(state, NORM, b, cfg)
            assert report.picard_iterations <= 5

    def test_picard_divergence_raises(self):
        g = Grid(shape=(8,), extent=(1.0,))
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0, 1.0), theta_Gamma=0.2)
        cfg = SolverConfig(dt=100.0, mode="picard", picard_max=4)
        state = make_state(g, 1.5, 0.0, 1.0)
        with pytest.raises(PicardDiverged):
            step(state, NORM, b, cfg)

    def test_modes_agree_to_first_order(self):
        g = Grid(shape=(16,), extent=(1.0,))
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0, 1.0), theta_Gamma=0.6)
        state = make_state(g, 1.0, 0.0, 1.0)
        s1, _ = step(state, NORM, b, SolverConfig(dt=1e-3, mode="staggered"))
        s2, _ = step(state, NORM, b, SolverConfig(dt=1e-3, mode="picard"))
        # the two modes differ by the temperature lag in one step, O(dt^2)
        # in the interior and O(dt) only in the first boundary layer
        assert np.max(np.abs(s1.theta.values - s2.theta.values)) < 1e-4


class TestContinuousDependence:
    def test_twin_runs_stay_close(self):
        g = Grid(shape=(32,), extent=(1.0,))
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0, 1.0), theta_Gamma=0.7)
        cfg = SolverConfig(dt=1e-3)
        rng = np.random.default_rng(21)
        theta0 = rng.uniform(0.8, 1.2, g.n_cells)
        a = make_state(g, theta0, 0.0, 1.0)
        bstate = make_state(g, theta0 + 1e-6, 0.0, 1.0)
        for _ in range(1000):
            a, _ = step(a, NORM, b, cfg)
            bstate, _ = step(bstate, NORM, b, cfg)
        gap = max(np.max(np.abs(a.theta.values - bstate.theta.values)),
                  np.max(np.abs(a.U.values - bstate.U.values)),
                  np.max(np.abs(a.chi.values - bstate.chi.values)))
        assert gap <= 1e-3


class TestSymmetryAndDescent:
    def test_mirror_symmetry_preserved(self):
        g = Grid(shape=(16,), extent=(1.0,))
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0, 1.0), theta_Gamma=0.5)
        cfg = SolverConfig(dt=5e-3)
        x = g.cell_centers()[:, 0]
        theta0 = 1.0 + 0.2 * np.cos(2 * math.pi * (x - 0.5))
        state = make_state(g, theta0, 0.0, 1.0)
        for _ in range(100):
            state, _ = step(state, NORM, b, cfg)
        for arr in (state.theta.values, state.U.values, state.chi.values):
            np.testing.assert_allclose(arr, arr[::-1], rtol=0, atol=1e-12)

    def test_resolvent_descends_phase_functional(self):
        # at theta_hat = theta_Gamma the update is a pure implicit-Euler
        # descent step: psi(new) + (1/dt) |new - old|^2_w <= psi(old)
        def psi(Uv, chiv, m, b, grid):
            dens = 0.5 * m.lam * (Uv - m.alpha * (1.0 - chiv)) ** 2 \
                + (m.L * chiv + m.beta * m.theta_c * Uv) * (1.0 - b.theta_Gamma / m.theta_c)
            total = float(dens.sum()) * grid.cell_volume
            UO = float(Uv.sum()) * grid.cell_volume
            total += 0.5 * b.K_Gamma * (UO + b.p0 / b.K_Gamma) ** 2
            return total

        rng = np.random.default_rng(31)
        g = Grid(shape=(16,), extent=(1.0,))
        m = NORM
        for theta_Gamma in (0.4, 0.9, 1.3):
            b = BoundaryParams(K_Gamma=0.8, h_faces=(1.0, 1.0),
                               theta_Gamma=theta_Gamma, p0=0.2)
            U = Field(g, rng.uniform(-0.5, 0.8, g.n_cells))
            chi = Field(g, rng.uniform(0.0, 1.0, g.n_cells))
            th = Field.constant(g, theta_Gamma)
            for dt in (0.5, 0.05, 0.005):
                U_new, chi_new, _ = resolvent_step_phase(th, U, chi, dt, m, b)
                dU = U_new.values - U.values
                dchi = chi_new.values - chi.values
                drop = psi(U.values, chi.values, m, b, g) \
                    - psi(U_new.values, chi_new.values, m, b, g)
                dissip = float(np.sum(m.nu * dU ** 2 + m.gamma * dchi ** 2)) \
                    * g.cell_volume / dt
                assert drop >= dissip - 1e-11 * max(1.0, abs(drop))
                U, chi = U_new, chi_new


class TestRunTrajectories:
    def test_constant_trajectory_at_equilibrium(self):
        g = Grid(shape=(16,), extent=(1.0,))
        m = NORM
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0, 1.0), theta_Gamma=1.0, p0=0.0)
        state0 = make_state(g, 1.0, 0.0, 1.0)
        cfg = SolverConfig(dt=0.01)
        records, final = run(state0, m, b, cfg, t_end=0.5)
        assert all(r.rate_norm <= 1e-12 for r in records)
        assert final.theta.values[0] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("theta_Gamma,x_frac", [(0.5, 1.0), (0.9, 0.3)])
    def test_steady_observables_match_equilibrium_analysis(self, theta_Gamma, x_frac):
        # freezing runs settle on the closed-form equilibrium values:
        # full solid below the lower threshold, total ice content
        # |Omega| chi_star inside the mushy window
        g = Grid(shape=(16,), extent=(1.0,))
        m = NORM
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0, 1.0),
                           theta_Gamma=theta_Gamma, p0=0.0)
        cfg = SolverConfig(dt=5e-3)
        state0 = make_state(g, 1.0, 0.0, 1.0)
        records, final = run(state0, m, b, cfg, t_end=35.0,
                             steady_rate_tol=1e-9, steady_grad_tol=1e-9)
        report = classify(theta_Gamma, groups_for(m, b, g.volume), m, b, g.volume)
        last = records[-1]
        assert last.X_Omega / g.volume == pytest.approx(x_frac, abs=1e-3)
        assert last.X_Omega == pytest.approx(report.X_Omega_inf, abs=1e-3)
        assert last.U_Omega == pytest.approx(report.U_Omega_inf, abs=1e-3)
        assert last.P_gauge == pytest.approx(report.P_inf, abs=1e-3)

    def test_steady_observables_first_order_in_dt(self):
        # transient observables at a fixed time move by O(dt) under
        # refinement: successive differences shrink roughly by half
        g = Grid(shape=(8,), extent=(1.0,))
        m = NORM
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0, 1.0), theta_Gamma=0.9)
        state0 = make_state(g, 1.0, 0.0, 1.0)
        values = []
        for dt in (4e-3, 2e-3, 1e-3):
            records, _ = run(state0, m, b, SolverConfig(dt=dt), t_end=2.0)
            values.append(records[-1].U_Omega)
        d1 = abs(values[0] - values[1])
        d2 = abs(values[1] - values[2])
        assert d1 / d2 == pytest.approx(2.0, abs=0.7)

    def test_three_dimensional_cooldown(self):
        # small 3D box cooled through all six sides: the step machinery
        # (CG solve, nonlocal root find, projection) works unchanged
        g = Grid(shape=(3, 3, 3), extent=(1.0, 1.0, 1.0))
        m = NORM
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0,) * 6, theta_Gamma=0.5)
        records, final = run(make_state(g, 1.0, 0.0, 1.0), m, b,
                             SolverConfig(dt=5e-3), t_end=1.0)
        assert final.theta.min() > 0.0
        assert final.chi.min() >= 0.0 and final.chi.max() <= 1.0
        assert records[-1].X_Omega > records[0].X_Omega  # freezing started
        slack = 1e-8 * abs(records[0].Psi)
        assert all(n.Psi <= p.Psi + slack for p, n in zip(records, records[1:]))

    def test_truncation_cutoff_is_neutral_when_loose(self):
        g = Grid(shape=(8,), extent=(1.0,))
        b = BoundaryParams(K_Gamma=1.0, h_faces=(1.0, 1.0), theta_Gamma=0.6)
        state0 = make_state(g, 1.0, 0.0, 1.0)
        base, _ = run(state0, NORM, b, SolverConfig(dt=1e-3), t_end=0.5)
        capped, _ = run(state0, NORM, b,
                        SolverConfig(dt=1e-3, truncation_R=50.0), t_end=0.5)
        # loose cutoff only switches the theta terms to their explicit
        # truncated form, an O(dt) perturbation
        assert capped[-1].U_Omega == pytest.approx(base[-1].U_Omega, abs=5e-3)
