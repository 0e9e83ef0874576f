"""Resistive connecting pipe: transport delay plus exponential attenuation.

The pipe replaces the 1-D wave equation with a delay-and-attenuate rule:
the outlet flow is the inlet flow one transit time L_t/c ago, scaled by
exp(-R_t R T L_t / (2 p c)).  The resistance R_t follows from the Darcy
pressure drop with the friction factor from the Haaland correlation
(laminar fallback 64/Re below Re 2300, blended linearly up to Re 4000,
since the turbulent correlation diverges as Re -> 0).

Inlet history lives in a fixed-interval ring buffer with linear
interpolation at lookup, which keeps memory constant and lookups
sub-sample accurate.  Before one transit time has elapsed since the
stream started the outlet is exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DelayLineUnderflowError, InvariantError
from .gasflow import GasProperties, sound_speed

__all__ = [
    "PipeSpec",
    "DelayLine",
    "reynolds",
    "haaland_friction",
    "friction_factor",
    "pipe_resistance",
    "propagate",
    "RE_LAMINAR",
    "RE_TURBULENT",
]

RE_LAMINAR = 2300.0
RE_TURBULENT = 4000.0

# Sizing temperature for delay-line capacity: sound speed at the integrator's
# temperature floor, so a lookup can never underflow while the run is valid.
SIZING_TEMPERATURE = 100.0


@dataclass(frozen=True)
class PipeSpec:
    """Pipe geometry; the cross-section area is derived from the diameter."""

    Lt: float  # length [m]
    D: float  # inner diameter [m]
    e_r: float  # absolute roughness [m]

    def __post_init__(self):
        if self.Lt <= 0.0 or self.D <= 0.0:
            raise InvariantError(f"pipe dimensions must be positive, got Lt={self.Lt}, D={self.D}")
        if self.e_r < 0.0:
            raise InvariantError(f"roughness must be >= 0, got {self.e_r}")

    @property
    def A_l(self) -> float:
        """Cross-section area pi D^2 / 4 [m^2]."""
        return math.pi * self.D * self.D / 4.0


class DelayLine:
    """Uniformly sampled inlet-flow history with linear interpolation.

    Single writer (the integrator).  Samples before the stream start are
    defined to be zero; asking for a time older than the retained window
    is a sizing bug and raises.
    """

    __slots__ = ("sample_interval", "start_time", "_buf", "_mask", "_count")

    def __init__(self, sample_interval: float, min_span: float, start_time: float = 0.0):
        if sample_interval <= 0.0:
            raise InvariantError(f"sample interval must be positive, got {sample_interval}")
        if min_span <= 0.0:
            raise InvariantError(f"history span must be positive, got {min_span}")
        n = 1
        while n < int(min_span / sample_interval) + 8:
            n *= 2
        self.sample_interval = sample_interval
        self.start_time = start_time
        self._buf = np.zeros(n)
        self._mask = n - 1
        self._count = 0

    @classmethod
    def for_pipe(cls, pipe: PipeSpec, gas: GasProperties, sample_interval: float,
                 start_time: float = 0.0) -> "DelayLine":
        """Sized to cover one transit time at the slowest plausible sound speed."""
        span = pipe.Lt / sound_speed(SIZING_TEMPERATURE, gas) + 4.0 * sample_interval
        return cls(sample_interval, span, start_time)

    @property
    def last_time(self) -> float:
        """Timestamp of the newest recorded sample."""
        return self.start_time + (self._count - 1) * self.sample_interval

    def append(self, value: float) -> None:
        """Record the inlet flow at the next grid instant."""
        self._buf[self._count & self._mask] = value
        self._count += 1

    def value_at(self, t: float) -> float:
        """Linearly interpolated inlet flow at time t; zero before the stream."""
        if self._count == 0 or t <= self.start_time:
            return 0.0
        pos = (t - self.start_time) / self.sample_interval
        idx = int(pos)
        last = self._count - 1
        if idx >= last:
            return float(self._buf[last & self._mask])
        oldest = self._count - len(self._buf)
        if idx < oldest:
            raise DelayLineUnderflowError(
                f"lookup at t={t} asks {oldest - idx} samples beyond the retained "
                f"history (capacity {len(self._buf)}); delay line undersized"
            )
        frac = pos - idx
        a = self._buf[idx & self._mask]
        b = self._buf[(idx + 1) & self._mask]
        return float(a + frac * (b - a))

    def copy(self) -> "DelayLine":
        dup = object.__new__(DelayLine)
        dup.sample_interval = self.sample_interval
        dup.start_time = self.start_time
        dup._buf = self._buf.copy()
        dup._mask = self._mask
        dup._count = self._count
        return dup

    def __eq__(self, other) -> bool:
        if not isinstance(other, DelayLine):
            return NotImplemented
        return (
            self.sample_interval == other.sample_interval
            and self.start_time == other.start_time
            and self._count == other._count
            and bool(np.array_equal(self._buf, other._buf))
        )


def reynolds(m_dot: float, pipe: PipeSpec, gas: GasProperties) -> float:
    """Pipe Reynolds number |mdot| D / (A_l mu); density cancels."""
    return abs(m_dot) * pipe.D / (pipe.A_l * gas.mu)


def haaland_friction(Re: float, pipe: PipeSpec) -> float:
    """Turbulent Darcy friction factor from the Haaland correlation.

    f = ( -1.8 log10( 6.9/Re + (e_r/(3.7 D))^1.11 ) )^-2
    """
    arg = 6.9 / Re + (pipe.e_r / (3.7 * pipe.D)) ** 1.11
    return (-1.8 * math.log10(arg)) ** -2


def friction_factor(Re: float, pipe: PipeSpec) -> float:
    """Darcy friction factor over all regimes.

    64/Re below Re 2300, Haaland above Re 4000, linear blend between.
    """
    if Re <= 0.0:
        return 0.0
    if Re < RE_LAMINAR:
        return 64.0 / Re
    if Re > RE_TURBULENT:
        return haaland_friction(Re, pipe)
    w = (Re - RE_LAMINAR) / (RE_TURBULENT - RE_LAMINAR)
    return (1.0 - w) * (64.0 / Re) + w * haaland_friction(Re, pipe)


def pipe_resistance(m_dot: float, pipe: PipeSpec, gas: GasProperties) -> float:
    """Pipe resistance R_t = f |mdot| / (2 D A_l); zero at zero flow."""
    if m_dot == 0.0:
        return 0.0
    f = friction_factor(reynolds(m_dot, pipe, gas), pipe)
    return f * abs(m_dot) / (2.0 * pipe.D * pipe.A_l)


def propagate(
    line: DelayLine, t: float, pipe: PipeSpec, p: float, T: float, gas: GasProperties
) -> float:
    """Outlet mass flow [kg/s] of the pipe at time t.

    Exactly zero until one transit time L_t/c after the stream start;
    afterwards the delayed inlet sample attenuated by
    exp(-R_t R T L_t / (2 p c)), with R_t evaluated at the delayed
    sample's own magnitude.  p and T are the pipe gas conditions chosen
    by the caller; c is the current sound speed at T (quasi-static delay).
    """
    c = sound_speed(T, gas)
    tau = pipe.Lt / c
    if t - line.start_time <= tau:
        return 0.0
    delayed = line.value_at(t - tau)
    if delayed == 0.0:
        return 0.0
    r_t = pipe_resistance(delayed, pipe, gas)
    return delayed * math.exp(-r_t * gas.R * T * pipe.Lt / (2.0 * p * c))
