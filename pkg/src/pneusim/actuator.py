"""Cylinder model: chamber thermodynamics, leakage, heat transfer, piston.

Each chamber carries (p, T) as state; mass and density are always derived
from the ideal-gas law.  The pressure and temperature rate laws are both
closed in (p, T, V) and are mutually consistent: the pressure rate equals
the time derivative of p = m R T / V with the temperature rate substituted
in, which the test suite checks to machine precision.

Sign conventions
  * piston position x runs from -Lr/2 (fully retracted) to +Lr/2, with
    chamber 1 (full bore, area A1) growing as x increases;
  * heat rate is negative when the chamber is hotter than ambient;
  * leakage flows are reported both signed (1->2 positive, 2->atm
    positive) and as per-chamber in/out attributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidStateError, InvariantError
from .gasflow import GasProperties, flow_constants, mass_flow_from_constants

__all__ = [
    "CylinderGeometry",
    "ChamberState",
    "PistonState",
    "ThermalParams",
    "LeakageSpec",
    "LoadSpec",
    "LeakageAttribution",
    "GRAVITY",
    "chamber_volumes",
    "wetted_area",
    "heat_rate",
    "temperature_rate",
    "pressure_rate",
    "leakage_flows",
    "piston_acceleration",
]

GRAVITY = 9.80665  # standard gravity [m/s^2]


@dataclass(frozen=True)
class CylinderGeometry:
    """Cylinder areas, stroke and dead volumes.

    A2 is stored and the rod area is derived as Ar = A1 - A2, so the
    identity holds exactly in floating point; likewise the stroke limits
    are derived as +-Lr/2.
    """

    A1: float  # full-bore piston area, chamber 1 side [m^2]
    A2: float  # annulus area, chamber 2 (rod) side [m^2]
    Lr: float  # stroke length [m]
    V01: float  # chamber 1 dead volume [m^3]
    V02: float  # chamber 2 dead volume [m^3]
    da: float  # external cylinder diameter [m]
    phi: float = 0.0  # inclination angle [rad]

    def __post_init__(self):
        if not self.A1 > self.A2 > 0.0:
            raise InvariantError(f"need A1 > A2 > 0, got A1={self.A1}, A2={self.A2}")
        if self.Lr <= 0.0:
            raise InvariantError(f"stroke length must be positive, got {self.Lr}")
        if self.V01 <= 0.0 or self.V02 <= 0.0:
            raise InvariantError("dead volumes must be positive")
        if self.da <= 0.0:
            raise InvariantError(f"external diameter must be positive, got {self.da}")

    @property
    def Ar(self) -> float:
        """Rod cross-section area A1 - A2 [m^2]."""
        return self.A1 - self.A2

    @property
    def x_min(self) -> float:
        return -0.5 * self.Lr

    @property
    def x_max(self) -> float:
        return 0.5 * self.Lr


@dataclass(frozen=True)
class ChamberState:
    p: float  # absolute pressure [Pa]
    T: float  # temperature [K]

    def __post_init__(self):
        if self.p <= 0.0 or self.T <= 0.0:
            raise InvariantError(f"chamber state must be positive, got p={self.p}, T={self.T}")


@dataclass(frozen=True)
class PistonState:
    x: float  # rod position [m]
    v: float  # rod velocity [m/s]


@dataclass(frozen=True)
class ThermalParams:
    lambda0: float  # convective coefficient at equilibrium [W/(m^2 K)]
    P0: float  # equilibrium pressure [Pa]
    T0: float  # equilibrium temperature [K]
    Ta: float  # ambient temperature [K]

    def __post_init__(self):
        if min(self.lambda0, self.P0, self.T0, self.Ta) <= 0.0:
            raise InvariantError("thermal parameters must be positive")


@dataclass(frozen=True)
class LeakageSpec:
    A_l1: float  # inter-chamber leakage area [m^2]
    A_l2: float  # chamber-2-to-atmosphere leakage area [m^2]
    c_dl: float  # leakage discharge coefficient [-]

    def __post_init__(self):
        if self.A_l1 < 0.0 or self.A_l2 < 0.0:
            raise InvariantError("leakage areas must be >= 0")
        if not 0.0 < self.c_dl <= 1.0:
            raise InvariantError(f"c_dl must be in (0, 1], got {self.c_dl}")


@dataclass(frozen=True)
class LoadSpec:
    """Moving masses.  The external force is a scenario input signal and is
    passed to piston_acceleration as a plain number."""

    M_l: float  # load mass [kg]
    M_p: float  # rod + piston mass [kg]

    def __post_init__(self):
        if self.M_l < 0.0 or self.M_p < 0.0:
            raise InvariantError("masses must be >= 0")
        if self.M_l + self.M_p <= 0.0:
            raise InvariantError("total moving mass must be positive")

    @property
    def M(self) -> float:
        return self.M_l + self.M_p


def chamber_volumes(
    x: float, geom: CylinderGeometry
) -> tuple[float, float, float, float]:
    """(V1, V2, dV1/dx, dV2/dx) at piston position x.

    V1 = V01 + A1 (Lr/2 + x), V2 = V02 + A2 (Lr/2 - x); the volume rates
    per unit piston velocity are A1 and -A2.
    """
    if not geom.x_min <= x <= geom.x_max:
        raise InvalidStateError(
            f"piston position {x} outside stroke [{geom.x_min}, {geom.x_max}]"
        )
    half = 0.5 * geom.Lr
    v1 = geom.V01 + geom.A1 * (half + x)
    v2 = geom.V02 + geom.A2 * (half - x)
    return v1, v2, geom.A1, -geom.A2


def wetted_area(x: float, chamber: int, geom: CylinderGeometry) -> float:
    """Heat-exchange surface pi*da*(Lr/2 +- x) of one chamber [m^2]."""
    half = 0.5 * geom.Lr
    if chamber == 1:
        return math.pi * geom.da * (half + x)
    if chamber == 2:
        return math.pi * geom.da * (half - x)
    raise ValueError(f"chamber must be 1 or 2, got {chamber}")


def heat_rate(
    state: ChamberState,
    x: float,
    chamber: int,
    thermal: ThermalParams,
    geom: CylinderGeometry,
) -> float:
    """Convective heat flow into the chamber gas [W].

    Qdot = -lambda0 sqrt(p T / (P0 T0)) * A_q(x) * (T - Ta); negative when
    the gas is hotter than ambient.
    """
    lam = thermal.lambda0 * math.sqrt(state.p * state.T / (thermal.P0 * thermal.T0))
    return -lam * wetted_area(x, chamber, geom) * (state.T - thermal.Ta)


def temperature_rate(
    state: ChamberState,
    V: float,
    V_dot: float,
    m_in: float,
    T_u_in: float,
    m_out: float,
    Q_dot: float,
    gas: GasProperties,
) -> float:
    """Open-chamber temperature rate [K/s].

    Tdot = (gamma-1) T / (p V) * (-p Vdot - R T m_out + Qdot)
           + (gamma T_u - T) * R T / (p V) * m_in
    """
    if state.p <= 0.0 or state.T <= 0.0 or V <= 0.0:
        raise InvalidStateError(
            f"need positive p, T, V; got p={state.p}, T={state.T}, V={V}"
        )
    gamma, R = gas.gamma, gas.R
    p, T = state.p, state.T
    return (gamma - 1.0) * T / (p * V) * (-p * V_dot - R * T * m_out + Q_dot) + (
        gamma * T_u_in - T
    ) * R * T / (p * V) * m_in


def pressure_rate(
    state: ChamberState,
    V: float,
    V_dot: float,
    m_in: float,
    T_u_in: float,
    m_out: float,
    Q_dot: float,
    gas: GasProperties,
) -> float:
    """Open-chamber pressure rate [Pa/s].

    Pdot = -gamma p/V Vdot + gamma R T_u/V m_in - gamma R T/V m_out
           + (gamma-1)/V Qdot
    """
    if state.p <= 0.0 or state.T <= 0.0 or V <= 0.0:
        raise InvalidStateError(
            f"need positive p, T, V; got p={state.p}, T={state.T}, V={V}"
        )
    gamma, R = gas.gamma, gas.R
    return (
        -gamma * state.p / V * V_dot
        + gamma * R * T_u_in / V * m_in
        - gamma * R * state.T / V * m_out
        + (gamma - 1.0) / V * Q_dot
    )


@dataclass(frozen=True)
class LeakageAttribution:
    """Per-chamber boundary-flow bookkeeping for the leak paths.

    ``tu_flow_*`` is the sum of (upstream temperature x inflow rate) over
    the inflows of that chamber [K kg/s]; adding further inflow sources
    stays linear, and the effective upstream temperature of the combined
    inflow is tu_flow / m_in.
    """

    m_in_1: float
    tu_flow_1: float
    m_out_1: float
    m_in_2: float
    tu_flow_2: float
    m_out_2: float


def leakage_flows(
    ch1: ChamberState,
    ch2: ChamberState,
    p_atm: float,
    T_atm: float,
    leak: LeakageSpec,
    gas: GasProperties,
) -> tuple[float, float, LeakageAttribution]:
    """Leak rates (m_l1, m_l2, attribution).

    m_l1 > 0 means chamber 1 -> chamber 2; m_l2 > 0 means chamber 2 ->
    atmosphere.  Each leak is a nozzle with the higher-pressure side
    upstream, using the source side's temperature (ambient when the
    atmosphere is the source).
    """
    consts = flow_constants(gas.gamma, gas.R)
    cda1 = leak.c_dl * leak.A_l1
    cda2 = leak.c_dl * leak.A_l2

    m_in_1 = tu_1 = m_out_1 = 0.0
    m_in_2 = tu_2 = m_out_2 = 0.0

    if ch1.p > ch2.p:
        m_l1 = mass_flow_from_constants(cda1, ch1.p, ch1.T, ch2.p, consts)
        m_out_1 += m_l1
        m_in_2 += m_l1
        tu_2 += ch1.T * m_l1
    elif ch2.p > ch1.p:
        m_l1 = -mass_flow_from_constants(cda1, ch2.p, ch2.T, ch1.p, consts)
        m_out_2 += -m_l1
        m_in_1 += -m_l1
        tu_1 += ch2.T * -m_l1
    else:
        m_l1 = 0.0

    if ch2.p > p_atm:
        m_l2 = mass_flow_from_constants(cda2, ch2.p, ch2.T, p_atm, consts)
        m_out_2 += m_l2
    elif p_atm > ch2.p:
        m_l2 = -mass_flow_from_constants(cda2, p_atm, T_atm, ch2.p, consts)
        m_in_2 += -m_l2
        tu_2 += T_atm * -m_l2
    else:
        m_l2 = 0.0

    return m_l1, m_l2, LeakageAttribution(m_in_1, tu_1, m_out_1, m_in_2, tu_2, m_out_2)


def net_piston_force(
    x: float,
    p1: float,
    p2: float,
    F_f: float,
    F_ext: float,
    p_atm: float,
    geom: CylinderGeometry,
    M: float,
) -> float:
    """Net applied force on the piston [N].

    Written in gauge form (p1 - p_atm) A1 - (p2 - p_atm) A2, which equals
    p1 A1 - p2 A2 - p_atm Ar through the rod-area identity Ar = A1 - A2
    and cancels exactly at the all-atmospheric equilibrium.
    """
    return (
        (p1 - p_atm) * geom.A1
        - (p2 - p_atm) * geom.A2
        - F_f
        - F_ext
        - M * GRAVITY * math.sin(geom.phi)
    )


def piston_acceleration(
    piston: PistonState,
    ch1: ChamberState,
    ch2: ChamberState,
    F_f: float,
    F_ext: float,
    load: LoadSpec,
    geom: CylinderGeometry,
    p_atm: float,
) -> tuple[float, float]:
    """(acceleration [m/s^2], hard-stop force [N]).

    In the interior the hard-stop force is zero.  At a stroke limit with
    the net force still pushing outward, the stop supplies exactly that
    force so the acceleration is zero; with the net force pulling inward
    the stop releases and motion resumes.
    """
    M = load.M
    net = net_piston_force(piston.x, ch1.p, ch2.p, F_f, F_ext, p_atm, geom, M)
    at_max = piston.x >= geom.x_max
    at_min = piston.x <= geom.x_min
    if (at_max and net > 0.0) or (at_min and net < 0.0):
        return 0.0, net
    return net / M, 0.0
