"""LuGre dynamic friction for the piston seal.

The model carries one internal state, the mean bristle deflection z.
Friction force is sigma0*z + sigma1*zdot + sigma2*v with the bristle rate
zdot = v - sigma0*|v|*z/g(v), where g is the Stribeck curve between the
static level Fs (at rest) and the Coulomb level Fc (fast sliding).

The Stribeck exponent is parameterised.  With the squared form (default)
g stays within [Fc, Fs] for either sign of velocity, which the bristle
bound |sigma0 z| <= Fs relies on; the unsquared form is selectable for
comparison and also uses |v| so it stays bounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvariantError

__all__ = ["LuGreParams", "LuGreState", "stribeck", "bristle_rate", "friction_force", "lugre_rates"]


@dataclass(frozen=True)
class LuGreParams:
    sigma0: float  # bristle stiffness [N/m]
    sigma1: float  # bristle damping [N s/m]
    sigma2: float  # viscous coefficient [N s/m]
    Fc: float  # Coulomb friction [N]
    Fs: float  # static friction [N]
    vs: float  # Stribeck velocity [m/s]
    stribeck_exponent: int = 2

    def __post_init__(self):
        if self.sigma0 < 0.0 or self.sigma1 < 0.0 or self.sigma2 < 0.0:
            raise InvariantError("sigma0, sigma1, sigma2 must be >= 0")
        if not 0.0 < self.Fc <= self.Fs:
            raise InvariantError(f"need 0 < Fc <= Fs, got Fc={self.Fc}, Fs={self.Fs}")
        if self.vs <= 0.0:
            raise InvariantError(f"Stribeck velocity must be positive, got {self.vs}")
        if self.stribeck_exponent not in (1, 2):
            raise InvariantError(
                f"Stribeck exponent must be 1 or 2, got {self.stribeck_exponent}"
            )


@dataclass(frozen=True)
class LuGreState:
    z: float  # bristle deflection [m]


def lugre_rates(
    v: float,
    z: float,
    sigma0: float,
    sigma1: float,
    sigma2: float,
    fc: float,
    fs: float,
    vs: float,
    exponent: int,
) -> tuple[float, float, float]:
    """Scalar kernel: (g, zdot, force) at one state.

    Shared by the public operations and the simulator hot loop so the
    formulas live in exactly one place.
    """
    u = abs(v) / vs
    g = fc + (fs - fc) * math.exp(-(u * u) if exponent == 2 else -u)
    zdot = v - sigma0 * abs(v) * z / g
    force = sigma0 * z + sigma1 * zdot + sigma2 * v
    return g, zdot, force


def stribeck(v: float, params: LuGreParams) -> float:
    """Stribeck level g(v) = Fc + (Fs - Fc) exp(-(|v|/vs)^n), in [Fc, Fs]."""
    return lugre_rates(
        v, 0.0, params.sigma0, params.sigma1, params.sigma2,
        params.Fc, params.Fs, params.vs, params.stribeck_exponent,
    )[0]


def bristle_rate(v: float, state: LuGreState, params: LuGreParams) -> float:
    """Bristle deflection rate zdot = v - sigma0 |v| z / g(v) [m/s]."""
    return lugre_rates(
        v, state.z, params.sigma0, params.sigma1, params.sigma2,
        params.Fc, params.Fs, params.vs, params.stribeck_exponent,
    )[1]


def friction_force(v: float, state: LuGreState, params: LuGreParams) -> float:
    """Friction force sigma0 z + sigma1 zdot + sigma2 v [N]."""
    return lugre_rates(
        v, state.z, params.sigma0, params.sigma1, params.sigma2,
        params.Fc, params.Fs, params.vs, params.stribeck_exponent,
    )[2]
