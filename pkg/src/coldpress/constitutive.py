"""Pointwise constitutive formulas.

Specific (per-mass) free energy, internal energy, and entropy of the
temperature/strain/phase state, the pressure law, the container boundary
energy, the dimensionless classification groups, and the pressure-melting
(Clausius-Clapeyron) slope.

All functions accept scalars or numpy arrays for the state arguments and
are pure; they are safe for concurrent use.
"""

from __future__ import annotations

import math

import numpy as np

from .materials import BoundaryParams, DimensionlessGroups, MaterialParams


def _check_state(theta, chi) -> None:
    theta = np.asarray(theta)
    chi = np.asarray(chi)
    if not np.all(np.isfinite(theta)) or np.any(theta <= 0.0):
        raise ValueError("temperature must be finite and > 0")
    if not np.all(np.isfinite(chi)) or np.any(chi < 0.0) or np.any(chi > 1.0):
        raise ValueError("phase fraction must lie in [0, 1]")


def free_energy_density(theta, U, chi, m: MaterialParams):
    """Specific free energy f(theta, U, chi), J/kg.

    f = c0*theta*(1 - log(theta/theta_c))
        + (lam/(2 rho0))*(U - alpha*(1-chi))^2
        - (beta/rho0)*(theta - theta_c)*U
        + L0*chi*(1 - theta/theta_c)

    The indicator of the admissible interval [0, 1] for chi contributes
    zero inside; values outside are rejected.

    Raises
    ------
    ValueError
        If theta <= 0 or chi is outside [0, 1].
    """
    _check_state(theta, chi)
    heat = m.c0 * theta * (1.0 - np.log(theta / m.theta_c))
    elastic = (m.lam / (2.0 * m.rho0)) * (U - m.alpha * (1.0 - chi)) ** 2
    thermal = -(m.beta / m.rho0) * (theta - m.theta_c) * U
    latent = m.L0 * chi * (1.0 - theta / m.theta_c)
    return heat + elastic + thermal + latent


def _internal_energy_raw(theta, U, chi, m: MaterialParams):
    return (m.c0 * theta
            + (m.lam / (2.0 * m.rho0)) * (U - m.alpha * (1.0 - chi)) ** 2
            + (m.beta / m.rho0) * m.theta_c * U
            + m.L0 * chi)


def _entropy_raw(theta, U, chi, m: MaterialParams):
    return (m.c0 * np.log(theta / m.theta_c)
            + (m.L0 / m.theta_c) * chi
            + (m.beta / m.rho0) * U)


def internal_energy_density(theta, U, chi, m: MaterialParams):
    """Specific internal energy e(theta, U, chi), J/kg.

    e = c0*theta + (lam/(2 rho0))*(U - alpha*(1-chi))^2
        + (beta/rho0)*theta_c*U + L0*chi
    """
    _check_state(theta, chi)
    return _internal_energy_raw(theta, U, chi, m)


def entropy_density(theta, U, chi, m: MaterialParams):
    """Specific entropy s(theta, U, chi), J/(kg K).

    s = c0*log(theta/theta_c) + (L0/theta_c)*chi + (beta/rho0)*U
    """
    _check_state(theta, chi)
    return _entropy_raw(theta, U, chi, m)


def pressure_deviation(theta, U, U_t, chi, m: MaterialParams):
    """Pressure deviation from standard pressure, J/m^3.

    p = -nu*U_t - lam*(U - alpha*(1-chi)) + beta*(theta - theta_c)

    On exact solutions of the coupled system this equals the gauge
    pressure P(t) = p0 + K_Gamma * U_Omega(t); the absolute pressure is
    P_stand plus the returned value.
    """
    theta = np.asarray(theta)
    if not np.all(np.isfinite(theta)) or np.any(theta <= 0.0):
        raise ValueError("temperature must be finite and > 0")
    return (-m.nu * U_t
            - m.lam * (U - m.alpha * (1.0 - chi))
            + m.beta * (theta - m.theta_c))


def boundary_energy(U_Omega: float, b: BoundaryParams) -> float:
    """Elastic energy stored in the container wall, J.

    E_Gamma = (K_Gamma/2) * (U_Omega + p0/K_Gamma)^2 for K_Gamma > 0.
    For K_Gamma = 0 the divergent constant p0^2/(2 K_Gamma) is dropped and
    the affine limit p0 * U_Omega is returned; only differences of
    E_Gamma enter the balance checks.
    """
    if b.K_Gamma == 0.0:
        return b.p0 * U_Omega
    return 0.5 * b.K_Gamma * (U_Omega + b.p0 / b.K_Gamma) ** 2


def dimensionless_groups(m: MaterialParams, b: BoundaryParams,
                         volume: float) -> DimensionlessGroups:
    """Classification groups d, beta_tilde, omega, chi_star, L_beta.

    d          = alpha^2 lam K_Gamma |Omega| / (L (lam + K_Gamma |Omega|))
    beta_tilde = alpha lam beta theta_c / (L (lam + K_Gamma |Omega|))
    omega      = alpha lam p0 / (L (lam + K_Gamma |Omega|))
    L_beta     = L0 - beta alpha theta_c / rho0            (J/kg)
    chi_star   = ((1 - beta_tilde)(1 - theta_Gamma/theta_c) - omega) / d,
                 defined only when d > 0.
    """
    if not (volume > 0.0 and math.isfinite(volume)):
        raise ValueError(f"volume must be finite and > 0, got {volume!r}")
    KV = b.K_Gamma * volume
    denom = m.L * (m.lam + KV)
    d = m.alpha ** 2 * m.lam * KV / denom
    beta_tilde = m.alpha * m.lam * m.beta * m.theta_c / denom
    omega = m.alpha * m.lam * b.p0 / denom
    L_beta = m.L0 - m.beta * m.alpha * m.theta_c / m.rho0
    if d > 0.0:
        chi_star = ((1.0 - beta_tilde) * (1.0 - b.theta_Gamma / m.theta_c)
                    - omega) / d
    else:
        chi_star = None
    return DimensionlessGroups(d=d, beta_tilde=beta_tilde, omega=omega,
                               chi_star=chi_star, L_beta=L_beta)


def clausius_clapeyron_slope(m: MaterialParams) -> float:
    """Pressure-melting slope dP/dtheta = -rho0 L_beta / (alpha theta_c).

    Negative for positive constants: raising the pressure lowers the
    transition temperature (the solid has the larger specific volume).
    Units J/(m^3 K).
    """
    L_beta = m.L0 - m.beta * m.alpha * m.theta_c / m.rho0
    return -m.rho0 * L_beta / (m.alpha * m.theta_c)
