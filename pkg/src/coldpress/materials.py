"""Material and container parameter sets.

All bulk constants are stored volumetrically (J/m^3 based).  Literature
tables usually quote per-mass values (J/kg); presets convert them through
the mass density rho0 at construction time, because the reduced evolution
system is written with volumetric heat capacity, relaxation coefficient,
and latent heat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


class ParameterError(ValueError):
    """A physical parameter violates its admissibility constraints."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ParameterError(msg)


@dataclass(frozen=True)
class MaterialParams:
    """Constants of the solidifying substance.

    Attributes
    ----------
    c : float
        Volumetric specific heat, J/(m^3 K).
    kappa : float
        Heat conductivity, W/(m K).
    nu : float
        Volume viscosity, Pa s.
    lam : float
        Bulk elasticity modulus, J/m^3.
    alpha : float
        Phase expansion coefficient (relative specific-volume excess of
        the solid over the liquid), dimensionless.
    beta : float
        Thermal expansion stress coefficient, J/(m^3 K).
    gamma : float
        Volumetric phase relaxation coefficient, J s/m^3.
    L : float
        Volumetric latent heat, J/m^3.
    theta_c : float
        Freezing point at standard pressure, K.
    rho0 : float
        Mass density, kg/m^3 (identical in both phases, small strains).
    """

    c: float
    kappa: float
    nu: float
    lam: float
    alpha: float
    beta: float
    gamma: float
    L: float
    theta_c: float
    rho0: float

    def __post_init__(self):
        for name in ("c", "kappa", "nu", "lam", "alpha", "beta", "gamma",
                     "L", "theta_c", "rho0"):
            value = getattr(self, name)
            _require(math.isfinite(value) and value > 0.0,
                     f"MaterialParams.{name} must be finite and > 0, got {value!r}")

    @property
    def c0(self) -> float:
        """Per-mass specific heat, J/(kg K)."""
        return self.c / self.rho0

    @property
    def L0(self) -> float:
        """Per-mass latent heat, J/kg."""
        return self.L / self.rho0

    @property
    def v0(self) -> float:
        """Speed of sound sqrt(lam / rho0), m/s."""
        return math.sqrt(self.lam / self.rho0)


@dataclass(frozen=True)
class BoundaryParams:
    """Container (boundary) data.

    Attributes
    ----------
    K_Gamma : float
        Aggregate boundary stiffness, J/m^6.  The total relative volume
        increment U_Omega and the gauge pressure are linked through
        P = p0 + K_Gamma * U_Omega.  K_Gamma = 0 models a stress-free
        (infinitely soft) container.
    h_faces : tuple of float
        Heat-transfer coefficient per boundary face, W/(m^2 K), ordered
        as (axis0-low, axis0-high, axis1-low, ...).  All nonnegative,
        at least one positive.
    theta_Gamma : float
        External temperature, K.
    p0 : float
        External pressure deviation from standard pressure, J/m^3.
    P_stand : float
        Standard pressure, J/m^3.  Only enters the absolute pressure
        P_stand + gauge; the evolution uses gauge values throughout.
    """

    K_Gamma: float
    h_faces: tuple[float, ...]
    theta_Gamma: float
    p0: float = 0.0
    P_stand: float = 1.0e5

    def __post_init__(self):
        object.__setattr__(self, "h_faces", tuple(float(h) for h in self.h_faces))
        _require(math.isfinite(self.K_Gamma) and self.K_Gamma >= 0.0,
                 f"BoundaryParams.K_Gamma must be >= 0, got {self.K_Gamma!r}")
        _require(math.isfinite(self.theta_Gamma) and self.theta_Gamma > 0.0,
                 f"BoundaryParams.theta_Gamma must be > 0, got {self.theta_Gamma!r}")
        _require(len(self.h_faces) > 0, "BoundaryParams.h_faces must not be empty")
        _require(all(math.isfinite(h) and h >= 0.0 for h in self.h_faces),
                 f"BoundaryParams.h_faces must all be >= 0, got {self.h_faces!r}")
        _require(any(h > 0.0 for h in self.h_faces),
                 "BoundaryParams.h_faces must contain at least one positive value")
        _require(math.isfinite(self.p0), "BoundaryParams.p0 must be finite")


@dataclass(frozen=True)
class DimensionlessGroups:
    """Classification numbers of the equilibrium analysis.

    chi_star is the mushy-equilibrium ice fraction; it is None (undefined,
    not clamped) when d = 0, i.e. when K_Gamma * volume = 0.
    """

    d: float                      # undercooling coefficient
    beta_tilde: float             # thermal-expansion group
    omega: float                  # external-pressure group
    chi_star: float | None        # mushy-equilibrium ice fraction
    L_beta: float                 # corrected latent heat, J/kg


@dataclass(frozen=True)
class Preset:
    name: str
    material: MaterialParams
    notes: str = ""

    def with_overrides(self, **kwargs: float) -> MaterialParams:
        """Material constants with selected fields replaced."""
        return replace(self.material, **kwargs)


# Liquid water near the freezing point.  c, lam, beta, L are converted to
# volumetric form from the usual per-mass table values via rho0 = 1000;
# alpha = (V_ice - V_water)/V_water with V_ice = 1.09e-3 m^3/kg;
# lam = rho0 * v0^2 with v0 = 1.5e3 m/s; beta = (beta/lam ratio 2.0e-4) * lam.
# kappa, nu, gamma are not fixed by that table; the values below are
# plausible magnitudes (conductivity of cold water, bulk viscosity a few
# times the shear viscosity, phase relaxation on the minutes scale so
# kinetics stay resolvable) and do not enter any of the equilibrium groups.
WATER = Preset(
    name="water",
    material=MaterialParams(
        c=4.2e6,        # 4.2e3 J/(kg K) * 1000 kg/m^3
        kappa=0.6,      # W/(m K)
        nu=2.5e-3,      # Pa s
        lam=2.25e9,     # 1000 * (1.5e3)^2
        alpha=0.09,
        beta=4.5e5,     # 2.0e-4 K^-1 * 2.25e9 J/m^3
        gamma=1.0e9,    # J s/m^3
        L=3.3e8,        # 3.3e5 J/kg * 1000 kg/m^3
        theta_c=273.0,
        rho0=1000.0,
    ),
    notes="Water/ice constants; kappa, nu, gamma supplied, not tabulated.",
)

# Unit constants used by the analysis-friendly normalization: every
# coefficient is 1 except the latent heat L = 2.
NORMALIZED = Preset(
    name="normalized",
    material=MaterialParams(
        c=1.0, kappa=1.0, nu=1.0, lam=1.0, alpha=1.0,
        beta=1.0, gamma=1.0, L=2.0, theta_c=1.0, rho0=1.0,
    ),
    notes="Unit coefficients, L = 2; convenient for property tests.",
)

PRESETS: dict[str, Preset] = {p.name: p for p in (WATER, NORMALIZED)}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ParameterError(f"unknown preset {name!r} (known: {known})") from None
