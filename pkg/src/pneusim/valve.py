"""Proportional spool valve: orifice area, mass flows, spool dynamics.

The sleeve orifice is a circle of radius Rh progressively uncovered by the
spool edge; the open area is a circular segment.  The spool land half-width
pw exceeds Rh, so there is a dead band |x_s| <= pw - Rh around center where
both paths are closed.  Positive spool displacement opens the supply path,
negative opens the exhaust path (mirror symmetry), and a positive solenoid
current drives positive displacement.

Spool motion is a linear second-order system
    Ms xs'' + cs xs' + 2 ks xs = Ksol i_c
with travel limits handled by the integrator as inelastic stops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidStateError, InvariantError
from .gasflow import GasProperties, flow_constants, mass_flow_from_constants

__all__ = [
    "ValveGeometry",
    "SpoolParams",
    "SpoolState",
    "segment_area",
    "effective_area",
    "opening_area",
    "valve_flows",
    "spool_acceleration",
]


@dataclass(frozen=True)
class ValveGeometry:
    Rh: float  # orifice hole radius [m]
    pw: float  # spool land half-width [m], pw > Rh (overlap)
    n_holes: int  # radial holes per path
    c_d: float  # discharge coefficient [-]
    x_s_max: float  # spool travel limit [m]

    def __post_init__(self):
        if not self.pw > self.Rh > 0.0:
            raise InvariantError(
                f"need pw > Rh > 0 (spool overlap), got pw={self.pw}, Rh={self.Rh}"
            )
        if self.n_holes < 1:
            raise InvariantError(f"n_holes must be >= 1, got {self.n_holes}")
        if not 0.0 < self.c_d <= 1.0:
            raise InvariantError(f"c_d must be in (0, 1], got {self.c_d}")
        if self.x_s_max <= 0.0:
            raise InvariantError(f"travel limit must be positive, got {self.x_s_max}")


@dataclass(frozen=True)
class SpoolParams:
    Ms: float  # spool mass [kg]
    cs: float  # viscous coefficient [N s/m]
    ks: float  # single spring stiffness [N/m]
    Ksol: float  # solenoid force constant [N/A]

    def __post_init__(self):
        if min(self.Ms, self.cs, self.ks, self.Ksol) <= 0.0:
            raise InvariantError("spool parameters must be positive")


@dataclass(frozen=True)
class SpoolState:
    x_s: float  # spool displacement [m]
    v_s: float  # spool velocity [m/s]


def segment_area(x_e: float, Rh: float) -> float:
    """Area of the circular segment uncovered at effective displacement x_e.

    2 Rh^2 arctan(sqrt(x_e/(2Rh - x_e))) - (Rh - x_e) sqrt(x_e (2Rh - x_e)),
    clamped to [0, pi Rh^2]; x_e = Rh uncovers exactly half the circle.
    """
    if not 0.0 <= x_e <= 2.0 * Rh:
        raise InvalidStateError(f"effective displacement {x_e} outside [0, {2.0 * Rh}]")
    if x_e == 0.0:
        return 0.0
    if x_e == 2.0 * Rh:
        return math.pi * Rh * Rh
    a = 2.0 * Rh * Rh * math.atan(math.sqrt(x_e / (2.0 * Rh - x_e))) - (
        Rh - x_e
    ) * math.sqrt(x_e * (2.0 * Rh - x_e))
    return min(max(a, 0.0), math.pi * Rh * Rh)


def opening_area(x_open: float, Rh: float, pw: float, n_holes: int) -> float:
    """Scalar kernel: open area of one path at signed displacement x_open.

    The path opens for x_open > pw - Rh, saturates at n pi Rh^2 beyond
    pw + Rh; zero in the dead band and on the far side.  Shared by the
    public operation and the simulator hot loop.
    """
    underlap = pw - Rh
    if x_open <= underlap:
        return 0.0
    if x_open >= pw + Rh:
        return n_holes * math.pi * Rh * Rh
    return n_holes * segment_area(x_open - underlap, Rh)


def effective_area(x_s: float, path: str, geom: ValveGeometry) -> float:
    """Open area [m^2] of the supply or exhaust path at spool position x_s.

    Supply opens for positive x_s, exhaust for negative (mirror symmetry);
    at most one path is open at any spool position.
    """
    if path == "supply":
        x_open = x_s
    elif path == "exhaust":
        x_open = -x_s
    else:
        raise ValueError(f"path must be 'supply' or 'exhaust', got {path!r}")
    return opening_area(x_open, geom.Rh, geom.pw, geom.n_holes)


def valve_flows(
    spool: SpoolState,
    p_sup: float,
    p_chamber: float,
    p_atm: float,
    T_sup: float,
    T_chamber: float,
    geom: ValveGeometry,
    gas: GasProperties,
) -> tuple[float, float]:
    """(m_in, m_out) [kg/s] toward/away from the controlled chamber.

    Supply path: nozzle from (p_sup, T_sup) into the chamber; if the
    chamber pressure exceeds supply while the path is open, the nozzle is
    re-oriented and the flow counts as m_out (back into the supply line).
    Exhaust path: nozzle from (p_chamber, T_chamber) to atmosphere; a
    chamber below atmospheric draws inflow through the open exhaust.
    """
    consts = flow_constants(gas.gamma, gas.R)
    m_in = m_out = 0.0

    a_sup = opening_area(spool.x_s, geom.Rh, geom.pw, geom.n_holes)
    if a_sup > 0.0:
        cda = geom.c_d * a_sup
        if p_sup >= p_chamber:
            m_in += mass_flow_from_constants(cda, p_sup, T_sup, p_chamber, consts)
        else:
            m_out += mass_flow_from_constants(cda, p_chamber, T_chamber, p_sup, consts)

    a_exh = opening_area(-spool.x_s, geom.Rh, geom.pw, geom.n_holes)
    if a_exh > 0.0:
        cda = geom.c_d * a_exh
        if p_chamber >= p_atm:
            m_out += mass_flow_from_constants(cda, p_chamber, T_chamber, p_atm, consts)
        else:
            m_in += mass_flow_from_constants(cda, p_atm, T_sup, p_chamber, consts)

    return m_in, m_out


def spool_acceleration(spool: SpoolState, i_c: float, params: SpoolParams) -> float:
    """Spool acceleration (Ksol i_c - cs v_s - 2 ks x_s) / Ms [m/s^2]."""
    return (params.Ksol * i_c - params.cs * spool.v_s - 2.0 * params.ks * spool.x_s) / params.Ms
