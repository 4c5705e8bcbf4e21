"""Closed-form equilibrium analysis.

The only possible equilibrium temperature is the exterior value
theta_Gamma.  Depending on where theta_Gamma sits relative to two
thresholds, the equilibrium phase distribution is pure liquid, pure
solid, or a continuum of mixtures sharing one total ice content.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .constitutive import dimensionless_groups
from .materials import BoundaryParams, DimensionlessGroups, MaterialParams

# Finite stand-in for an infinitely rigid container: K_Gamma * |Omega|
# = RIGID_FACTOR * lam keeps every formula finite while matching the
# rigid limit to a relative 1e-12.
RIGID_FACTOR = 1.0e12


class ClassificationError(ValueError):
    """The regime classification does not apply (beta_tilde >= 1)."""


class Regime(enum.Enum):
    LIQUID = "Liquid"
    SOLID = "Solid"
    MUSHY = "Mushy"


@dataclass(frozen=True)
class EquilibriumReport:
    regime: Regime
    chi_inf: float | None      # None means nonunique (mushy continuum)
    X_Omega_inf: float          # total ice content, m^3
    U_inf: float                # mean volume increment per unit volume
    P_inf: float                # gauge pressure p0 + K_Gamma * U_Omega, J/m^3
    theta_liquid: float
    theta_solid: float

    @property
    def U_Omega_inf(self) -> float:
        return self.U_inf * self._volume

    # volume is carried for convenience of the U_Omega accessor
    _volume: float = 1.0


def thresholds(g: DimensionlessGroups, theta_c: float) -> tuple[float, float]:
    """Temperature thresholds (theta_liquid, theta_solid).

    Pure liquid for theta_Gamma >= theta_c (1 - omega/(1 - beta_tilde));
    pure solid for theta_Gamma <= theta_c (1 - (omega + d)/(1 - beta_tilde)).
    Requires beta_tilde < 1; the window between them carries the mushy
    continuum and is empty exactly when d = 0.
    """
    if not g.beta_tilde < 1.0:
        raise ClassificationError(
            f"classification requires beta_tilde < 1, got {g.beta_tilde:g}")
    theta_liquid = theta_c * (1.0 - g.omega / (1.0 - g.beta_tilde))
    theta_solid = theta_c * (1.0 - (g.omega + g.d) / (1.0 - g.beta_tilde))
    return theta_liquid, theta_solid


def _u_omega_from_ice(theta_Gamma: float, X_Omega: float, m: MaterialParams,
                      b: BoundaryParams, volume: float) -> float:
    """Total volume increment at equilibrium for a given total ice content:

        (lam + K_Gamma |Omega|) U_Omega
            = |Omega| (beta (theta_Gamma - theta_c) - p0)
              + alpha lam X_Omega
    """
    return (volume * (m.beta * (theta_Gamma - m.theta_c) - b.p0)
            + m.alpha * m.lam * X_Omega) / (m.lam + b.K_Gamma * volume)


def classify(theta_Gamma: float, g: DimensionlessGroups, m: MaterialParams,
             b: BoundaryParams, volume: float) -> EquilibriumReport:
    """Equilibrium regime and state values for exterior temperature
    theta_Gamma.

    Liquid: chi = 1 everywhere, no ice.  Solid: chi = 0 everywhere.
    Mushy: every phase profile with total ice content |Omega| chi_star is
    an equilibrium, so chi_inf is reported as nonunique (None) and only
    the total ice content and the mean volume increment are determined.
    """
    theta_liquid, theta_solid = thresholds(g, m.theta_c)
    if theta_Gamma >= theta_liquid:
        regime, chi_inf, X = Regime.LIQUID, 1.0, 0.0
    elif theta_Gamma <= theta_solid:
        regime, chi_inf, X = Regime.SOLID, 0.0, volume
    else:
        chi_star = ((1.0 - g.beta_tilde) * (1.0 - theta_Gamma / m.theta_c)
                    - g.omega) / g.d
        regime, chi_inf, X = Regime.MUSHY, None, volume * chi_star
    U_Omega = _u_omega_from_ice(theta_Gamma, X, m, b, volume)
    return EquilibriumReport(
        regime=regime, chi_inf=chi_inf, X_Omega_inf=X,
        U_inf=U_Omega / volume, P_inf=b.p0 + b.K_Gamma * U_Omega,
        theta_liquid=theta_liquid, theta_solid=theta_solid,
        _volume=volume)


@dataclass(frozen=True)
class LimitRow:
    label: str
    K_Gamma_volume: float      # the product K_Gamma * |Omega|, J/m^3
    U_inf: float
    P_inf_minus_p0: float
    d: float


def limit_behaviors(g: DimensionlessGroups, m: MaterialParams,
                    b: BoundaryParams) -> tuple[LimitRow, LimitRow]:
    """Solid-regime values at the soft and rigid container limits.

    Evaluates the stress balance of the fully solid state (thermal
    expansion and external pressure dropped, as in the limit discussion)

        U_inf = alpha lam / (lam + K_Gamma |Omega|),
        P_inf - p0 = K_Gamma |Omega| U_inf

    at K_Gamma |Omega| = 0 (soft: full expansion alpha, ambient pressure)
    and at the rigid surrogate K_Gamma |Omega| = 1e12 lam (no expansion,
    overpressure alpha lam).  The undercooling coefficient d is reported
    for both rows.
    """
    rows = []
    for label, KV in (("soft", 0.0), ("rigid", RIGID_FACTOR * m.lam)):
        U_inf = m.alpha * m.lam / (m.lam + KV)
        rows.append(LimitRow(
            label=label,
            K_Gamma_volume=KV,
            U_inf=U_inf,
            P_inf_minus_p0=KV * U_inf,
            d=m.alpha ** 2 * m.lam * KV / (m.L * (m.lam + KV)),
        ))
    return tuple(rows)


def rigid_boundary(m: MaterialParams, volume: float, h_faces, theta_Gamma: float,
                   p0: float = 0.0) -> BoundaryParams:
    """BoundaryParams with the documented rigid-container surrogate
    K_Gamma = 1e12 lam / |Omega|."""
    return BoundaryParams(K_Gamma=RIGID_FACTOR * m.lam / volume,
                          h_faces=tuple(h_faces), theta_Gamma=theta_Gamma, p0=p0)


def groups_for(m: MaterialParams, b: BoundaryParams, volume: float) -> DimensionlessGroups:
    """Convenience re-export so callers need only this module."""
    return dimensionless_groups(m, b, volume)
