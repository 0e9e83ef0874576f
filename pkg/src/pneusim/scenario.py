"""Scenario documents: parameter sets, input signals, builtins, YAML round trip.

A scenario is a complete, self-contained run description: every physical
parameter, the three input signals (two valve currents and the external
force), initial conditions and integrator settings.  Scenarios resolve
against the bundled default parameter file, and every value carries a
provenance tag (``paper``, ``assumed`` or ``user``) so assumed numbers are
distinguishable from published ones.

Documents are plain mappings (YAML on disk).  Unknown keys are rejected,
missing keys fall back to the defaults, and parse(serialize(s)) == s.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

import yaml

from .actuator import CylinderGeometry, LeakageSpec, LoadSpec, ThermalParams
from .errors import InvariantError, ScenarioError
from .friction import LuGreParams
from .gasflow import GasProperties, sound_speed
from .transmission import PipeSpec
from .valve import SpoolParams, ValveGeometry

__all__ = [
    "PiecewiseConstant",
    "SupplySpec",
    "InputSignals",
    "InitialConditions",
    "IntegrationSettings",
    "Scenario",
    "SCHEMA_VERSION",
    "load_defaults_document",
    "resolve_document",
    "parse_scenario",
    "serialize_scenario",
    "scenario_to_yaml",
    "save_scenario",
    "builtin_names",
    "builtin_description",
    "builtin_scenarios",
    "builtin_scenario",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PiecewiseConstant:
    """Right-continuous piecewise-constant signal starting at t = 0."""

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.times) != len(self.values) or not self.times:
            raise InvariantError("signal needs equally many times and values, at least one")
        if self.times[0] != 0.0:
            raise InvariantError(f"signal must start at t=0, got {self.times[0]}")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise InvariantError("signal times must be strictly increasing")

    def value(self, t: float) -> float:
        out = self.values[0]
        for i in range(1, len(self.times)):
            if t >= self.times[i]:
                out = self.values[i]
            else:
                break
        return out

    @staticmethod
    def constant(value: float) -> "PiecewiseConstant":
        return PiecewiseConstant((0.0,), (float(value),))

    @staticmethod
    def pulse(value: float, stop: float, start: float = 0.0) -> "PiecewiseConstant":
        """`value` on [start, stop), zero elsewhere."""
        if start == 0.0:
            return PiecewiseConstant((0.0, stop), (float(value), 0.0))
        return PiecewiseConstant((0.0, start, stop), (0.0, float(value), 0.0))

    def to_doc(self) -> dict:
        return {"times": list(self.times), "values": list(self.values)}

    @staticmethod
    def from_doc(doc, where: str) -> "PiecewiseConstant":
        if not isinstance(doc, dict) or set(doc) != {"times", "values"}:
            raise ScenarioError(f"{where}: a signal is a mapping with 'times' and 'values'")
        try:
            return PiecewiseConstant(
                tuple(float(t) for t in doc["times"]),
                tuple(float(v) for v in doc["values"]),
            )
        except InvariantError as exc:
            raise ScenarioError(f"{where}: {exc}") from exc


@dataclass(frozen=True)
class SupplySpec:
    p_sup: float  # supply pressure [Pa], ideal constant-pressure source
    p_atm: float  # atmospheric pressure [Pa]

    def __post_init__(self):
        if self.p_sup <= 0.0 or self.p_atm <= 0.0:
            raise InvariantError("supply and atmospheric pressures must be positive")


@dataclass(frozen=True)
class InputSignals:
    i_c1: PiecewiseConstant  # valve 1 solenoid current [A]
    i_c2: PiecewiseConstant  # valve 2 solenoid current [A]
    F_ext: PiecewiseConstant  # external force on the rod [N]


@dataclass(frozen=True)
class InitialConditions:
    x: float
    v: float
    p1: float
    p2: float
    T1: float
    T2: float

    def __post_init__(self):
        if min(self.p1, self.p2, self.T1, self.T2) <= 0.0:
            raise InvariantError("initial pressures and temperatures must be positive")


@dataclass(frozen=True)
class IntegrationSettings:
    dt: float  # integrator step [s]
    duration: float  # simulated time [s]
    sample_interval: float  # trace output interval [s]

    def __post_init__(self):
        if self.dt <= 0.0:
            raise InvariantError(f"dt must be positive, got {self.dt}")
        if self.duration < 0.0:
            raise InvariantError(f"duration must be >= 0, got {self.duration}")
        if self.sample_interval < self.dt:
            raise InvariantError("sample interval must be at least one step")
        sps = self.sample_interval / self.dt
        if abs(sps - round(sps)) > 1e-6 * sps:
            raise InvariantError("sample interval must be an integer number of steps")
        if self.duration > 0.0:
            ns = self.duration / self.sample_interval
            if abs(ns - round(ns)) > 1e-6 * max(ns, 1.0):
                raise InvariantError("duration must be an integer number of sample intervals")

    @property
    def steps_per_sample(self) -> int:
        return round(self.sample_interval / self.dt)

    @property
    def n_samples(self) -> int:
        return round(self.duration / self.sample_interval) + 1


@dataclass(frozen=True)
class Scenario:
    name: str
    gas: GasProperties
    cylinder: CylinderGeometry
    thermal: ThermalParams
    leakage: LeakageSpec
    load: LoadSpec
    friction: LuGreParams
    valve: ValveGeometry
    spool: SpoolParams
    pipe: PipeSpec
    supply: SupplySpec
    inputs: InputSignals
    initial: InitialConditions
    integration: IntegrationSettings
    provenance: dict


# Document layout: section -> (dataclass, ordered field names).
_SECTIONS: dict[str, tuple[type, tuple[str, ...]]] = {
    "gas": (GasProperties, ("cp", "cv", "mu")),
    "cylinder": (CylinderGeometry, ("A1", "A2", "Lr", "V01", "V02", "da", "phi")),
    "thermal": (ThermalParams, ("lambda0", "P0", "T0", "Ta")),
    "leakage": (LeakageSpec, ("A_l1", "A_l2", "c_dl")),
    "load": (LoadSpec, ("M_l", "M_p")),
    "friction": (
        LuGreParams,
        ("sigma0", "sigma1", "sigma2", "Fc", "Fs", "vs", "stribeck_exponent"),
    ),
    "valve": (ValveGeometry, ("Rh", "pw", "n_holes", "c_d", "x_s_max")),
    "spool": (SpoolParams, ("Ms", "cs", "ks", "Ksol")),
    "pipe": (PipeSpec, ("Lt", "D", "e_r")),
    "supply": (SupplySpec, ("p_sup", "p_atm")),
    "initial": (InitialConditions, ("x", "v", "p1", "p2", "T1", "T2")),
    "integration": (IntegrationSettings, ("dt", "duration", "sample_interval")),
}
_INT_LEAVES = {"friction.stribeck_exponent", "valve.n_holes"}
_SIGNAL_NAMES = ("i_c1", "i_c2", "F_ext")
_TOP_KEYS = set(_SECTIONS) | {"schema", "name", "inputs", "provenance"}


def load_defaults_document() -> dict:
    """Deep copy of the bundled default parameter document."""
    return copy.deepcopy(_defaults_cache())


_DEFAULTS: dict | None = None


def _defaults_cache() -> dict:
    global _DEFAULTS
    if _DEFAULTS is None:
        text = resources.files("pneusim").joinpath("data/defaults.yaml").read_text("utf-8")
        _DEFAULTS = yaml.safe_load(text)
    return _DEFAULTS


def _check_document_keys(doc: dict, where: str) -> None:
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ScenarioError(f"{where}: unknown top-level keys {sorted(unknown)}")
    for section, (_, names) in _SECTIONS.items():
        if section not in doc:
            continue
        body = doc[section]
        if not isinstance(body, dict):
            raise ScenarioError(f"{where}: section '{section}' must be a mapping")
        bad = set(body) - set(names)
        if bad:
            raise ScenarioError(f"{where}: unknown keys in '{section}': {sorted(bad)}")
    if "inputs" in doc:
        body = doc["inputs"]
        if not isinstance(body, dict):
            raise ScenarioError(f"{where}: 'inputs' must be a mapping")
        bad = set(body) - set(_SIGNAL_NAMES)
        if bad:
            raise ScenarioError(f"{where}: unknown input signals {sorted(bad)}")
    if "provenance" in doc:
        body = doc["provenance"]
        if not isinstance(body, dict):
            raise ScenarioError(f"{where}: 'provenance' must be a mapping")
        for key in body:
            section, _, leaf = key.partition(".")
            if section == "inputs":
                if leaf not in _SIGNAL_NAMES:
                    raise ScenarioError(f"{where}: provenance for unknown key '{key}'")
            elif section not in _SECTIONS or leaf not in _SECTIONS[section][1]:
                raise ScenarioError(f"{where}: provenance for unknown key '{key}'")


def _coerce(dotted: str, raw, where: str):
    if isinstance(raw, bool) or not isinstance(raw, (int, float, str)):
        raise ScenarioError(f"{where}: value for '{dotted}' must be a number, got {raw!r}")
    try:
        if dotted in _INT_LEAVES:
            out = int(raw)
            if float(out) != float(raw):
                raise ValueError
            return out
        return float(raw)
    except (TypeError, ValueError):
        raise ScenarioError(f"{where}: value for '{dotted}' is not numeric: {raw!r}") from None


def resolve_document(doc: dict, overrides: dict | None = None, where: str = "scenario") -> Scenario:
    """Resolve a (possibly partial) document against the defaults.

    ``overrides`` maps dotted keys (e.g. ``friction.Fs``) to values and is
    applied last with provenance ``user``.
    """
    if not isinstance(doc, dict):
        raise ScenarioError(f"{where}: scenario document must be a mapping")
    _check_document_keys(doc, where)
    if "schema" in doc and doc["schema"] != SCHEMA_VERSION:
        raise ScenarioError(
            f"{where}: unsupported schema version {doc['schema']!r}, expected {SCHEMA_VERSION}"
        )

    base = load_defaults_document()
    merged = {sec: dict(base[sec]) for sec in _SECTIONS}
    signals = {name: copy.deepcopy(base["inputs"][name]) for name in _SIGNAL_NAMES}
    provenance = dict(base["provenance"])
    explicit = doc.get("provenance", {})

    for section, (_, names) in _SECTIONS.items():
        for key, raw in doc.get(section, {}).items():
            dotted = f"{section}.{key}"
            merged[section][key] = _coerce(dotted, raw, where)
            provenance[dotted] = explicit.get(dotted, "user")
    for name in _SIGNAL_NAMES:
        if name in doc.get("inputs", {}):
            dotted = f"inputs.{name}"
            signals[name] = PiecewiseConstant.from_doc(doc["inputs"][name], where).to_doc()
            provenance[dotted] = explicit.get(dotted, "user")

    for dotted, raw in (overrides or {}).items():
        section, _, leaf = dotted.partition(".")
        if section not in _SECTIONS or leaf not in _SECTIONS[section][1]:
            raise ScenarioError(f"{where}: override targets unknown key '{dotted}'")
        merged[section][leaf] = _coerce(dotted, raw, where)
        provenance[dotted] = "user"

    kwargs = {"name": str(doc.get("name", "")), "provenance": provenance}
    for section, (cls, names) in _SECTIONS.items():
        body = merged[section]
        missing = [n for n in names if n not in body]
        if missing:
            raise ScenarioError(f"{where}: section '{section}' is missing {missing}")
        values = {n: _coerce(f"{section}.{n}", body[n], where) for n in names}
        try:
            kwargs[section] = cls(**values)
        except InvariantError as exc:
            raise InvariantError(f"{where}: {section}: {exc}") from exc
    kwargs["inputs"] = InputSignals(
        **{n: PiecewiseConstant.from_doc(signals[n], where) for n in _SIGNAL_NAMES}
    )
    sc = Scenario(**kwargs)
    _cross_validate(sc, where)
    return sc


def _cross_validate(sc: Scenario, where: str) -> None:
    geom = sc.cylinder
    if not geom.x_min <= sc.initial.x <= geom.x_max:
        raise InvariantError(
            f"{where}: initial position {sc.initial.x} outside stroke "
            f"[{geom.x_min}, {geom.x_max}]"
        )
    # The delay line must always reach at least one step into the past.
    transit_fast = sc.pipe.Lt / sound_speed(400.0, sc.gas)
    if transit_fast < 2.0 * sc.integration.dt:
        raise InvariantError(
            f"{where}: pipe transit time {transit_fast:.3g} s must be at least "
            f"two integration steps (dt={sc.integration.dt:.3g} s)"
        )


def parse_scenario(source, overrides: dict | None = None) -> Scenario:
    """Build a Scenario from a builtin name, a YAML file path, or a mapping."""
    if isinstance(source, dict):
        return resolve_document(source, overrides)
    if isinstance(source, Scenario):
        return resolve_document(serialize_scenario(source), overrides)
    name = str(source)
    if name in _BUILTINS:
        return resolve_document(_builtin_document(name), overrides, where=name)
    path = Path(name)
    if not path.exists():
        raise ScenarioError(
            f"'{name}' is neither a builtin scenario ({', '.join(builtin_names())}) "
            "nor an existing file"
        )
    try:
        doc = yaml.safe_load(path.read_text("utf-8"))
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{path}: not valid YAML: {exc}") from exc
    return resolve_document(doc, overrides, where=str(path))


def serialize_scenario(sc: Scenario) -> dict:
    """Canonical full document for a scenario (round-trips through parse)."""
    doc: dict = {"schema": SCHEMA_VERSION, "name": sc.name}
    for section, (_, names) in _SECTIONS.items():
        obj = getattr(sc, section)
        doc[section] = {n: getattr(obj, n) for n in names}
    doc["inputs"] = {n: getattr(sc.inputs, n).to_doc() for n in _SIGNAL_NAMES}
    doc["provenance"] = dict(sorted(sc.provenance.items()))
    return doc


def scenario_to_yaml(sc: Scenario) -> str:
    return yaml.safe_dump(serialize_scenario(sc), sort_keys=False, default_flow_style=False)


def save_scenario(sc: Scenario, path) -> None:
    Path(path).write_text(scenario_to_yaml(sc), "utf-8")


# ---------------------------------------------------------------------------
# Builtin scenarios: the published simulation protocol.
#
# High-speed set (a)-(d): step currents +-0.5 A on the two valves, with and
# without the 5 kg load, from rest at midstroke and atmospheric chambers.
# Elasticity set (e)-(l): valves centered, an external force pulse against
# trapped air; (i)-(l) start pre-pressurised at p1 = supply, p2 = 815707 Pa.
# ---------------------------------------------------------------------------

_T1_DURATION = 0.3
_T2_DURATION = 0.4

_BUILTINS: dict[str, dict] = {}
_DESCRIPTIONS: dict[str, str] = {}


def _register_table1(letter: str, i1: float, i2: float, m_l: float) -> None:
    name = f"table1-{letter}"
    _BUILTINS[name] = {
        "inputs": {
            "i_c1": PiecewiseConstant.constant(i1).to_doc(),
            "i_c2": PiecewiseConstant.constant(i2).to_doc(),
        },
        "load": {"M_l": m_l},
        "integration": {"duration": _T1_DURATION},
        "provenance": {
            "inputs.i_c1": "paper",
            "inputs.i_c2": "paper",
            "load.M_l": "paper",
            "integration.duration": "assumed",
        },
    }
    _DESCRIPTIONS[name] = (
        f"high-speed stroke: i_c1={i1:+.1f} A, i_c2={i2:+.1f} A, load {m_l:g} kg"
    )


def _register_table2(letter: str, f_ext: float, t_a: float, p1: float, p2: float,
                     pressurised: bool) -> None:
    name = f"table2-{letter}"
    _BUILTINS[name] = {
        "inputs": {
            "i_c1": PiecewiseConstant.constant(0.0).to_doc(),
            "i_c2": PiecewiseConstant.constant(0.0).to_doc(),
            "F_ext": PiecewiseConstant.pulse(f_ext, t_a).to_doc(),
        },
        "initial": {"p1": p1, "p2": p2},
        "integration": {"duration": _T2_DURATION},
        "provenance": {
            "inputs.i_c1": "paper",
            "inputs.i_c2": "paper",
            "inputs.F_ext": "paper",
            "initial.p1": "paper",
            "initial.p2": "paper",
            "integration.duration": "assumed",
        },
    }
    kind = "hit" if t_a < 0.05 else "push"
    state = "pre-pressurised" if pressurised else "atmospheric"
    _DESCRIPTIONS[name] = (
        f"elasticity {kind}: F_ext={f_ext:+g} N for {t_a:g} s, {state} chambers, valves shut"
    )


def _register_builtins() -> None:
    _register_table1("a", 0.5, -0.5, 0.0)
    _register_table1("b", 0.5, -0.5, 5.0)
    _register_table1("c", -0.5, 0.5, 0.0)
    _register_table1("d", -0.5, 0.5, 5.0)
    p_atm = 101325.0
    p_sup = 701325.0
    p2_eq = 815707.0
    _register_table2("e", 20.0, 0.1, p_atm, p_atm, False)
    _register_table2("f", -20.0, 0.1, p_atm, p_atm, False)
    _register_table2("g", 250.0, 0.01, p_atm, p_atm, False)
    _register_table2("h", -250.0, 0.01, p_atm, p_atm, False)
    _register_table2("i", 20.0, 0.1, p_sup, p2_eq, True)
    _register_table2("j", -20.0, 0.1, p_sup, p2_eq, True)
    _register_table2("k", 250.0, 0.01, p_sup, p2_eq, True)
    _register_table2("l", -250.0, 0.01, p_sup, p2_eq, True)


_register_builtins()


def _builtin_document(name: str) -> dict:
    doc = copy.deepcopy(_BUILTINS[name])
    doc["name"] = name
    return doc


def builtin_names() -> list[str]:
    return list(_BUILTINS)


def builtin_description(name: str) -> str:
    return _DESCRIPTIONS[name]


def builtin_scenario(name: str) -> Scenario:
    if name not in _BUILTINS:
        raise ScenarioError(f"unknown builtin scenario '{name}'")
    return resolve_document(_builtin_document(name), where=name)


def builtin_scenarios() -> dict[str, Scenario]:
    """All bundled scenarios, keyed by name, in publication order."""
    return {name: builtin_scenario(name) for name in _BUILTINS}
