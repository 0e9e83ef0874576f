"""Full-system assembly and fixed-step integration.

State vector (11 dynamic scalars plus bookkeeping):

    x, v        piston position and velocity
    z           friction bristle deflection
    p1, T1      advancing chamber
    p2, T2      returning chamber
    x_s1, v_s1  valve 1 spool
    x_s2, v_s2  valve 2 spool
    cum1, cum2  integrated net boundary mass flow per chamber (audit)

plus two pipe delay lines (inlet-flow histories).  Topology: each valve
feeds its chamber through one resistive pipe; the chambers leak into each
other and chamber 2 leaks to atmosphere; the piston couples the chambers
mechanically and is subject to LuGre friction, the external force and
hard stops at the stroke limits.

Integration is the classical explicit 4-stage scheme at a fixed step,
with event handling by post-step clamping: travel limits are inelastic
(velocity zeroed when pushing outward) and a piston snap back to the
stroke limit rescales the chamber gas isentropically so no mass is
created or destroyed by the clamp.  Everything is deterministic:
identical scenarios produce bit-identical traces.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .actuator import GRAVITY
from .errors import IntegrationError, InvariantError
from .friction import lugre_rates
from .gasflow import flow_constants, mass_flow_from_constants, sound_speed
from .scenario import (  # noqa: F401  (re-exported: scenarios are part of this surface)
    Scenario,
    builtin_names,
    builtin_scenario,
    builtin_scenarios,
    parse_scenario,
)
from .trace import Trace
from .transmission import DelayLine, propagate
from .valve import opening_area

__all__ = [
    "SystemState",
    "Derivative",
    "Scenario",
    "Trace",
    "initial_state",
    "derivative",
    "step",
    "run",
    "run_many",
    "builtin_scenarios",
    "builtin_scenario",
    "builtin_names",
    "parse_scenario",
    "PRESSURE_FLOOR",
    "TEMPERATURE_FLOOR",
]

# Undershoot guards: small dips below the floor are clamped, dips past half
# the floor abort the run as an instability.
PRESSURE_FLOOR = 100.0  # Pa
TEMPERATURE_FLOOR = 50.0  # K

_R13 = range(13)


@dataclass
class SystemState:
    """Complete integrator state; a value that can be copied and compared."""

    x: float
    v: float
    z: float
    p1: float
    T1: float
    p2: float
    T2: float
    x_s1: float
    v_s1: float
    x_s2: float
    v_s2: float
    line1: DelayLine
    line2: DelayLine
    flow_cum1: float = 0.0
    flow_cum2: float = 0.0

    def scalars(self) -> list:
        return [
            self.x, self.v, self.z, self.p1, self.T1, self.p2, self.T2,
            self.x_s1, self.v_s1, self.x_s2, self.v_s2,
            self.flow_cum1, self.flow_cum2,
        ]


class Derivative(NamedTuple):
    """State rates plus the per-evaluation flow and force diagnostics."""

    dx: float
    dv: float
    dz: float
    dp1: float
    dT1: float
    dp2: float
    dT2: float
    dx_s1: float
    dv_s1: float
    dx_s2: float
    dv_s2: float
    dcum1: float
    dcum2: float
    w1: float  # pipe 1 inlet flow (valve 1 outlet, signed toward chamber)
    w2: float
    F_f: float
    F_hs: float
    m1_in: float
    m1_out: float
    m2_in: float
    m2_out: float
    ml1: float  # inter-chamber leak, positive 1 -> 2
    ml2: float  # chamber 2 -> atmosphere leak, positive out


def _compile(sc: Scenario, line1: DelayLine, line2: DelayLine):
    """Build the derivative and inlet-flow closures with everything local."""
    gas = sc.gas
    gamma = gas.gamma
    R = gas.R
    gm1 = gamma - 1.0
    consts = flow_constants(gamma, R)

    geom = sc.cylinder
    A1, A2 = geom.A1, geom.A2
    hl = 0.5 * geom.Lr
    V01, V02 = geom.V01, geom.V02
    xmin, xmax = geom.x_min, geom.x_max
    pi_da = math.pi * geom.da

    th = sc.thermal
    Ta = th.Ta
    lam_c = th.lambda0 / math.sqrt(th.P0 * th.T0)

    lk = sc.leakage
    cda_l1 = lk.c_dl * lk.A_l1
    cda_l2 = lk.c_dl * lk.A_l2

    fr = sc.friction
    s0, s1, s2 = fr.sigma0, fr.sigma1, fr.sigma2
    fc, fs, vstr, nexp = fr.Fc, fr.Fs, fr.vs, fr.stribeck_exponent

    vg = sc.valve
    Rh, pw, nh, cdv = vg.Rh, vg.pw, vg.n_holes, vg.c_d
    xsmax = vg.x_s_max

    sp = sc.spool
    inv_Ms = 1.0 / sp.Ms
    cs, ks2, Ksol = sp.cs, 2.0 * sp.ks, sp.Ksol

    pipe = sc.pipe
    p_sup = sc.supply.p_sup
    p_atm = sc.supply.p_atm

    M = sc.load.M
    inv_M = 1.0 / M
    grav = M * GRAVITY * math.sin(geom.phi)

    sig = sc.inputs
    i1_t, i1_v = sig.i_c1.times, sig.i_c1.values
    i2_t, i2_v = sig.i_c2.times, sig.i_c2.values
    fx_t, fx_v = sig.F_ext.times, sig.F_ext.values

    tau_peek = pipe.Lt / sound_speed(Ta, gas)

    flow = mass_flow_from_constants
    area = opening_area
    sqrt = math.sqrt

    def sigval(times, values, t):
        out = values[0]
        for k in range(1, len(times)):
            if t >= times[k]:
                out = values[k]
            else:
                break
        return out

    def valve_outlet(x_s, p_ch, T_ch):
        # Positive toward the chamber; the higher pressure is always upstream.
        a_s = area(x_s, Rh, pw, nh)
        if a_s > 0.0:
            cda = cdv * a_s
            if p_sup >= p_ch:
                return flow(cda, p_sup, Ta, p_ch, consts)
            return -flow(cda, p_ch, T_ch, p_sup, consts)
        a_e = area(-x_s, Rh, pw, nh)
        if a_e > 0.0:
            cda = cdv * a_e
            if p_ch >= p_atm:
                return -flow(cda, p_ch, T_ch, p_atm, consts)
            return flow(cda, p_atm, Ta, p_ch, consts)
        return 0.0

    def inlet_flows(y):
        return (
            valve_outlet(y[7], y[3], y[4]),
            valve_outlet(y[9], y[5], y[6]),
        )

    def deriv(t, y):
        x = y[0]
        v = y[1]
        z = y[2]
        p1 = y[3]
        T1 = y[4]
        p2 = y[5]
        T2 = y[6]
        xs1 = y[7]
        vs1 = y[8]
        xs2 = y[9]
        vs2 = y[10]

        i1 = i1_v[0] if len(i1_t) == 1 else sigval(i1_t, i1_v, t)
        i2 = i2_v[0] if len(i2_t) == 1 else sigval(i2_t, i2_v, t)
        fx = fx_v[0] if len(fx_t) == 1 else sigval(fx_t, fx_v, t)

        # spools: linear second-order, held at the travel limits
        as1 = (Ksol * i1 - cs * vs1 - ks2 * xs1) * inv_Ms
        if xs1 >= xsmax:
            if as1 > 0.0:
                as1 = 0.0
        elif xs1 <= -xsmax:
            if as1 < 0.0:
                as1 = 0.0
        as2 = (Ksol * i2 - cs * vs2 - ks2 * xs2) * inv_Ms
        if xs2 >= xsmax:
            if as2 > 0.0:
                as2 = 0.0
        elif xs2 <= -xsmax:
            if as2 < 0.0:
                as2 = 0.0

        w1 = valve_outlet(xs1, p1, T1)
        w2 = valve_outlet(xs2, p2, T2)

        # pipe outlets; gas conditions follow the delayed stream's source side
        s_pk = line1.value_at(t - tau_peek)
        if s_pk >= 0.0:
            q1 = propagate(line1, t, pipe, p_sup, Ta, gas)
        else:
            q1 = propagate(line1, t, pipe, p1, T1, gas)
        s_pk = line2.value_at(t - tau_peek)
        if s_pk >= 0.0:
            q2 = propagate(line2, t, pipe, p_sup, Ta, gas)
        else:
            q2 = propagate(line2, t, pipe, p2, T2, gas)

        # chamber boundary attribution (tu = sum of T_upstream * inflow)
        in1 = tu1 = out1 = 0.0
        in2 = tu2 = out2 = 0.0
        if q1 > 0.0:
            in1 = q1
            tu1 = Ta * q1
        elif q1 < 0.0:
            out1 = -q1
        if q2 > 0.0:
            in2 = q2
            tu2 = Ta * q2
        elif q2 < 0.0:
            out2 = -q2

        if p1 > p2:
            ml1 = flow(cda_l1, p1, T1, p2, consts)
            out1 += ml1
            in2 += ml1
            tu2 += T1 * ml1
        elif p2 > p1:
            m = flow(cda_l1, p2, T2, p1, consts)
            ml1 = -m
            out2 += m
            in1 += m
            tu1 += T2 * m
        else:
            ml1 = 0.0

        if p2 > p_atm:
            ml2 = flow(cda_l2, p2, T2, p_atm, consts)
            out2 += ml2
        elif p_atm > p2:
            m = flow(cda_l2, p_atm, Ta, p2, consts)
            ml2 = -m
            in2 += m
            tu2 += Ta * m
        else:
            ml2 = 0.0

        # chamber volumes, heat exchange and state rates
        V1 = V01 + A1 * (hl + x)
        V2 = V02 + A2 * (hl - x)
        V1dot = A1 * v
        V2dot = -A2 * v
        Q1 = -lam_c * sqrt(p1 * T1) * pi_da * (hl + x) * (T1 - Ta)
        Q2 = -lam_c * sqrt(p2 * T2) * pi_da * (hl - x) * (T2 - Ta)

        dT1 = gm1 * T1 / (p1 * V1) * (-p1 * V1dot - R * T1 * out1 + Q1) + (
            R * T1 / (p1 * V1)
        ) * (gamma * tu1 - T1 * in1)
        dp1 = (
            -gamma * p1 / V1 * V1dot
            + gamma * R * tu1 / V1
            - gamma * R * T1 / V1 * out1
            + gm1 / V1 * Q1
        )
        dT2 = gm1 * T2 / (p2 * V2) * (-p2 * V2dot - R * T2 * out2 + Q2) + (
            R * T2 / (p2 * V2)
        ) * (gamma * tu2 - T2 * in2)
        dp2 = (
            -gamma * p2 / V2 * V2dot
            + gamma * R * tu2 / V2
            - gamma * R * T2 / V2 * out2
            + gm1 / V2 * Q2
        )

        # friction and piston force balance (gauge form of the area terms)
        _, dz, Ff = lugre_rates(v, z, s0, s1, s2, fc, fs, vstr, nexp)
        net = (p1 - p_atm) * A1 - (p2 - p_atm) * A2 - Ff - fx - grav
        if x >= xmax and net > 0.0:
            a = 0.0
            Fhs = net
        elif x <= xmin and net < 0.0:
            a = 0.0
            Fhs = net
        else:
            a = net * inv_M
            Fhs = 0.0

        return (
            v, a, dz, dp1, dT1, dp2, dT2,
            vs1, as1, vs2, as2,
            in1 - out1, in2 - out2,
            w1, w2, Ff, Fhs, in1, out1, in2, out2, ml1, ml2,
        )

    return inlet_flows, deriv


class _Engine:
    """One compiled scenario plus mutable integration state."""

    def __init__(self, sc: Scenario, dt: float | None = None,
                 state: SystemState | None = None, copy_lines: bool = True):
        self.sc = sc
        self.dt = float(dt) if dt is not None else sc.integration.dt
        if self.dt <= 0.0:
            raise InvariantError(f"dt must be positive, got {self.dt}")
        self.h = 0.5 * self.dt

        geom = sc.cylinder
        self.gamma = sc.gas.gamma
        self.A1, self.A2 = geom.A1, geom.A2
        self.hl = 0.5 * geom.Lr
        self.V01, self.V02 = geom.V01, geom.V02
        self.xmin, self.xmax = geom.x_min, geom.x_max
        self.xsmax = sc.valve.x_s_max
        self.R = sc.gas.R

        if state is None:
            ini = sc.initial
            self.y = [
                ini.x, ini.v, 0.0, ini.p1, ini.T1, ini.p2, ini.T2,
                0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            ]
            self.line1 = DelayLine.for_pipe(sc.pipe, sc.gas, self.h)
            self.line2 = DelayLine.for_pipe(sc.pipe, sc.gas, self.h)
            self.inlet_flows, self.deriv = _compile(sc, self.line1, self.line2)
            w1, w2 = self.inlet_flows(self.y)
            self.line1.append(w1)
            self.line2.append(w2)
        else:
            expected = 0.5 * self.dt
            if not math.isclose(state.line1.sample_interval, expected, rel_tol=1e-9):
                raise InvariantError(
                    f"state delay lines were built for dt="
                    f"{2.0 * state.line1.sample_interval:g}, not dt={self.dt:g}"
                )
            self.y = state.scalars()
            self.line1 = state.line1.copy() if copy_lines else state.line1
            self.line2 = state.line2.copy() if copy_lines else state.line2
            self.inlet_flows, self.deriv = _compile(sc, self.line1, self.line2)

    def to_state(self) -> SystemState:
        y = self.y
        return SystemState(
            x=y[0], v=y[1], z=y[2], p1=y[3], T1=y[4], p2=y[5], T2=y[6],
            x_s1=y[7], v_s1=y[8], x_s2=y[9], v_s2=y[10],
            line1=self.line1, line2=self.line2,
            flow_cum1=y[11], flow_cum2=y[12],
        )

    def step(self, t: float) -> list:
        y = self.y
        dt = self.dt
        h = self.h
        f = self.deriv
        k1 = f(t, y)
        th = t + h
        yt = [y[i] + h * k1[i] for i in _R13]
        k2 = f(th, yt)
        yt = [y[i] + h * k2[i] for i in _R13]
        k3 = f(th, yt)
        te = t + dt
        yt = [y[i] + dt * k3[i] for i in _R13]
        k4 = f(te, yt)
        d6 = dt / 6.0
        yn = [y[i] + d6 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) for i in _R13]

        # inlet history: stage-mean sample at t + dt/2, end-state sample at t + dt
        self.line1.append(0.5 * (k2[13] + k3[13]))
        self.line2.append(0.5 * (k2[14] + k3[14]))
        w1, w2 = self.inlet_flows(yn)
        self.line1.append(w1)
        self.line2.append(w2)

        self._events(te, yn)
        self.y = yn
        return yn

    def _snap_piston(self, y: list, target: float) -> None:
        # Isentropic rescale of both chambers onto the clamped position so the
        # clamp conserves chamber mass exactly.
        x = y[0]
        gamma = self.gamma
        v1b = self.V01 + self.A1 * (self.hl + x)
        v2b = self.V02 + self.A2 * (self.hl - x)
        if v1b <= 0.0 or v2b <= 0.0:
            raise IntegrationError("piston overshot a stroke limit past the dead volume")
        v1a = self.V01 + self.A1 * (self.hl + target)
        v2a = self.V02 + self.A2 * (self.hl - target)
        r1 = v1b / v1a
        r2 = v2b / v2a
        y[3] *= r1**gamma
        y[4] *= r1 ** (gamma - 1.0)
        y[5] *= r2**gamma
        y[6] *= r2 ** (gamma - 1.0)
        y[0] = target

    def _events(self, t: float, y: list) -> None:
        if y[0] > self.xmax:
            self._snap_piston(y, self.xmax)
            if y[1] > 0.0:
                y[1] = 0.0
        elif y[0] < self.xmin:
            self._snap_piston(y, self.xmin)
            if y[1] < 0.0:
                y[1] = 0.0

        xsmax = self.xsmax
        if y[7] > xsmax:
            y[7] = xsmax
            if y[8] > 0.0:
                y[8] = 0.0
        elif y[7] < -xsmax:
            y[7] = -xsmax
            if y[8] < 0.0:
                y[8] = 0.0
        if y[9] > xsmax:
            y[9] = xsmax
            if y[10] > 0.0:
                y[10] = 0.0
        elif y[9] < -xsmax:
            y[9] = -xsmax
            if y[10] < 0.0:
                y[10] = 0.0

        for idx, name in ((3, "p1"), (5, "p2")):
            val = y[idx]
            if not val >= PRESSURE_FLOOR:
                if val > 0.5 * PRESSURE_FLOOR:
                    y[idx] = PRESSURE_FLOOR
                else:
                    raise IntegrationError(
                        f"chamber pressure {name}={val!r} Pa undershot the floor",
                        t, self.dt,
                    )
        for idx, name in ((4, "T1"), (6, "T2")):
            val = y[idx]
            if not val >= TEMPERATURE_FLOOR:
                if val > 0.5 * TEMPERATURE_FLOOR:
                    y[idx] = TEMPERATURE_FLOOR
                else:
                    raise IntegrationError(
                        f"chamber temperature {name}={val!r} K undershot the floor",
                        t, self.dt,
                    )
        for idx in (0, 1, 2, 7, 8, 9, 10, 11, 12):
            val = y[idx]
            if val - val != 0.0:
                raise IntegrationError(
                    f"state component {idx} became non-finite ({val!r})", t, self.dt
                )


def initial_state(scenario: Scenario, dt: float | None = None) -> SystemState:
    """Fresh state at the scenario's initial conditions with seeded pipe history."""
    return _Engine(scenario, dt).to_state()


def derivative(state: SystemState, t: float, scenario: Scenario) -> Derivative:
    """Evaluate all subsystem rates once at (state, t)."""
    eng = _Engine(scenario, dt=2.0 * state.line1.sample_interval, state=state,
                  copy_lines=False)
    return Derivative._make(eng.deriv(t, state.scalars()))


def step(state: SystemState, t: float, dt: float, scenario: Scenario) -> SystemState:
    """Advance one fixed step from (state, t); the input state is not mutated."""
    eng = _Engine(scenario, dt=dt, state=state, copy_lines=True)
    eng.step(t)
    return eng.to_state()


def run(scenario: Scenario) -> Trace:
    """Integrate the scenario and return the sampled trace.

    Deterministic: the same scenario yields a bit-identical trace.
    """
    integ = scenario.integration
    eng = _Engine(scenario)
    dt = eng.dt
    sps = integ.steps_per_sample
    n_samples = integ.n_samples
    total_steps = (n_samples - 1) * sps

    cols = {name: [] for name in (
        "t", "x", "v", "a", "p1", "p2", "T1", "T2",
        "m1_in", "m1_out", "m2_in", "m2_out", "ml1", "ml2",
        "F_f", "F_hs", "x_s1", "x_s2",
    )}
    m1s: list[float] = []
    m2s: list[float] = []
    cum1s: list[float] = []
    cum2s: list[float] = []

    A1, A2, hl = eng.A1, eng.A2, eng.hl
    V01, V02, R = eng.V01, eng.V02, eng.R
    deriv = eng.deriv

    def emit(t: float, y: list) -> None:
        d = deriv(t, y)
        cols["t"].append(t)
        cols["x"].append(y[0])
        cols["v"].append(y[1])
        cols["a"].append(d[1])
        cols["p1"].append(y[3])
        cols["p2"].append(y[5])
        cols["T1"].append(y[4])
        cols["T2"].append(y[6])
        cols["m1_in"].append(d[17])
        cols["m1_out"].append(d[18])
        cols["m2_in"].append(d[19])
        cols["m2_out"].append(d[20])
        cols["ml1"].append(d[21])
        cols["ml2"].append(d[22])
        cols["F_f"].append(d[15])
        cols["F_hs"].append(d[16])
        cols["x_s1"].append(y[7])
        cols["x_s2"].append(y[9])
        m1s.append(y[3] * (V01 + A1 * (hl + y[0])) / (R * y[4]))
        m2s.append(y[5] * (V02 + A2 * (hl - y[0])) / (R * y[6]))
        cum1s.append(y[11])
        cum2s.append(y[12])

    try:
        for i in range(total_steps):
            if i % sps == 0:
                emit(i * dt, eng.y)
            eng.step(i * dt)
        emit(total_steps * dt, eng.y)
    except IntegrationError as exc:
        raise IntegrationError(
            f"scenario '{scenario.name or 'unnamed'}' failed: {exc}"
        ) from exc

    return Trace(
        {name: np.array(vals) for name, vals in cols.items()},
        m1=np.array(m1s),
        m2=np.array(m2s),
        flow_cum1=np.array(cum1s),
        flow_cum2=np.array(cum2s),
    )


def run_many(scenarios, parallel: bool | None = None) -> list[Trace]:
    """Run independent scenarios, in parallel processes when it helps."""
    seq = list(scenarios)
    if parallel is None:
        parallel = len(seq) > 1 and (os.cpu_count() or 1) > 1
    if not parallel or len(seq) < 2:
        return [run(sc) for sc in seq]
    workers = min(len(seq), os.cpu_count() or 1)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, seq))
