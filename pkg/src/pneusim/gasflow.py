"""Ideal-gas properties and the convergent-nozzle mass-flow law.

Every flow path in the model (valve orifices, inter-chamber leakage,
rod-seal leakage to atmosphere) is an isentropic convergent nozzle with a
discharge coefficient absorbing the vena contracta.  The law switches
between a subsonic branch and a choked branch at the critical pressure
ratio, which is always computed from gamma rather than hard-coded, so the
two branches meet exactly.

Callers orient the flow: ``p_u`` is always the higher pressure and the
returned rate is non-negative; sign conventions live upstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidStateError, InvariantError

__all__ = [
    "GasProperties",
    "OrificeSpec",
    "critical_pressure_ratio",
    "nozzle_mass_flow",
    "subsonic_mass_flow",
    "choked_mass_flow",
    "sound_speed",
    "flow_constants",
    "mass_flow_from_constants",
]


@dataclass(frozen=True)
class GasProperties:
    """Constant-property ideal gas.

    cp and cv are the stored quantities; R and gamma are derived so the
    identities R = cp - cv and gamma = cp/cv hold exactly as floats.
    """

    cp: float  # specific heat at constant pressure [J/(kg K)]
    cv: float  # specific heat at constant volume [J/(kg K)]
    mu: float = 1.8e-5  # dynamic viscosity [Pa s]; only the pipe Reynolds number uses it

    def __post_init__(self):
        if not (self.cp > 0.0 and self.cv > 0.0 and self.mu > 0.0):
            raise InvariantError("gas properties must be strictly positive")
        if self.cp <= self.cv:
            raise InvariantError(f"cp must exceed cv, got cp={self.cp}, cv={self.cv}")

    @property
    def R(self) -> float:
        """Specific gas constant [J/(kg K)]."""
        return self.cp - self.cv

    @property
    def gamma(self) -> float:
        """Heat-capacity ratio cp/cv."""
        return self.cp / self.cv

    @staticmethod
    def air() -> "GasProperties":
        """Standard dry air near 20 degC (R = 287.0, gamma = 1.4 exactly)."""
        return GasProperties(cp=1004.5, cv=717.5, mu=1.8e-5)


@dataclass(frozen=True)
class OrificeSpec:
    """Effective geometric area plus discharge coefficient of one orifice."""

    area: float  # [m^2]
    discharge_coeff: float  # [-]

    def __post_init__(self):
        if self.area < 0.0:
            raise InvariantError(f"orifice area must be >= 0, got {self.area}")
        if not 0.0 < self.discharge_coeff <= 1.0:
            raise InvariantError(
                f"discharge coefficient must be in (0, 1], got {self.discharge_coeff}"
            )


def flow_constants(gamma: float, R: float) -> tuple[float, float, float, float, float]:
    """Precompute the gas-dependent pieces of the nozzle law.

    Returns (r_crit, e1, e2, c_sub, c_sonic) with
      r_crit  = (2/(gamma+1))^(gamma/(gamma-1))
      e1, e2  = 2/gamma, (gamma+1)/gamma
      c_sub   = sqrt(2 gamma / (R (gamma-1)))
      c_sonic = sqrt(gamma/R * (2/(gamma+1))^((gamma+1)/(gamma-1)))
    so that  mdot = p_u * cd*A * c_* / sqrt(T_u)  per branch.
    """
    r_crit = (2.0 / (gamma + 1.0)) ** (gamma / (gamma - 1.0))
    e1 = 2.0 / gamma
    e2 = (gamma + 1.0) / gamma
    c_sub = math.sqrt(2.0 * gamma / (R * (gamma - 1.0)))
    c_sonic = math.sqrt(gamma / R * (2.0 / (gamma + 1.0)) ** ((gamma + 1.0) / (gamma - 1.0)))
    return r_crit, e1, e2, c_sub, c_sonic


def mass_flow_from_constants(
    cd_area: float,
    p_u: float,
    T_u: float,
    p_d: float,
    consts: tuple[float, float, float, float, float],
) -> float:
    """Nozzle mass flow [kg/s] with precomputed gas constants (hot path).

    Assumes an already-oriented, already-validated call: p_u >= p_d >= 0,
    p_u > 0, T_u > 0.
    """
    if cd_area == 0.0:
        return 0.0
    r_crit, e1, e2, c_sub, c_sonic = consts
    r = p_d / p_u
    if r > r_crit:
        bracket = r**e1 - r**e2
        if bracket <= 0.0:  # r == 1 up to rounding
            return 0.0
        return p_u * cd_area * c_sub * math.sqrt(bracket / T_u)
    return p_u * cd_area * c_sonic / math.sqrt(T_u)


def critical_pressure_ratio(gas: GasProperties) -> float:
    """Downstream/upstream pressure ratio at which the flow chokes.

    (2/(gamma+1))^(gamma/(gamma-1)); about 0.528 for air.
    """
    gamma = gas.gamma
    return (2.0 / (gamma + 1.0)) ** (gamma / (gamma - 1.0))


def _check_nozzle_inputs(p_u: float, T_u: float, p_d: float) -> None:
    if p_u <= 0.0 or T_u <= 0.0:
        raise InvalidStateError(
            f"nozzle upstream state must be positive, got p_u={p_u}, T_u={T_u}"
        )
    if p_d < 0.0:
        raise InvalidStateError(f"downstream pressure must be >= 0, got {p_d}")
    if p_d > p_u:
        raise InvalidStateError(
            f"flow not oriented: p_d={p_d} exceeds p_u={p_u}; caller must put the "
            "higher pressure upstream"
        )


def nozzle_mass_flow(
    orifice: OrificeSpec, p_u: float, T_u: float, p_d: float, gas: GasProperties
) -> float:
    """Mass flow [kg/s] through a convergent nozzle, subsonic or choked.

    Subsonic for p_d/p_u above the critical ratio, choked below; the two
    branches coincide at the switch point.  Always >= 0.
    """
    _check_nozzle_inputs(p_u, T_u, p_d)
    cd_area = orifice.discharge_coeff * orifice.area
    return mass_flow_from_constants(cd_area, p_u, T_u, p_d, flow_constants(gas.gamma, gas.R))


def subsonic_mass_flow(
    orifice: OrificeSpec, p_u: float, T_u: float, p_d: float, gas: GasProperties
) -> float:
    """The subsonic branch of the nozzle law, evaluated unconditionally."""
    _check_nozzle_inputs(p_u, T_u, p_d)
    _, e1, e2, c_sub, _ = flow_constants(gas.gamma, gas.R)
    r = p_d / p_u
    bracket = max(r**e1 - r**e2, 0.0)
    return p_u * orifice.discharge_coeff * orifice.area * c_sub * math.sqrt(bracket / T_u)


def choked_mass_flow(orifice: OrificeSpec, p_u: float, T_u: float, gas: GasProperties) -> float:
    """The sonic (choked) branch of the nozzle law; independent of p_d."""
    _check_nozzle_inputs(p_u, T_u, 0.0)
    consts = flow_constants(gas.gamma, gas.R)
    return p_u * orifice.discharge_coeff * orifice.area * consts[4] / math.sqrt(T_u)


def sound_speed(T: float, gas: GasProperties) -> float:
    """Ideal-gas speed of sound sqrt(gamma R T) [m/s]."""
    if T <= 0.0:
        raise InvalidStateError(f"temperature must be positive, got {T}")
    return math.sqrt(gas.gamma * gas.R * T)
