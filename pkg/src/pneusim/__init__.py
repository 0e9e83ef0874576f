"""Deterministic lumped-parameter simulator of a servopneumatic actuator.

Two proportional spool valves feed a low-friction cylinder through
resistive pipes; the package models compressible orifice flow, chamber
thermodynamics with convective heat exchange, inter-chamber and rod-seal
leakage, LuGre seal friction, pipe transport delay and the spool dynamics,
and runs declarative scenarios to CSV traces and figures.
"""

from .errors import (
    DelayLineUnderflowError,
    IntegrationError,
    InvalidStateError,
    InvariantError,
    PneusimError,
    ScenarioError,
)
from .gasflow import GasProperties, OrificeSpec
from .scenario import Scenario, builtin_names, builtin_scenario, builtin_scenarios, parse_scenario
from .simulator import SystemState, initial_state, run, run_many, step
from .trace import RunSummary, Trace, export_trace, import_trace, summarize

__version__ = "0.1.0"

__all__ = [
    "GasProperties",
    "OrificeSpec",
    "Scenario",
    "SystemState",
    "Trace",
    "RunSummary",
    "builtin_names",
    "builtin_scenario",
    "builtin_scenarios",
    "parse_scenario",
    "initial_state",
    "step",
    "run",
    "run_many",
    "summarize",
    "export_trace",
    "import_trace",
    "PneusimError",
    "InvariantError",
    "InvalidStateError",
    "ScenarioError",
    "IntegrationError",
    "DelayLineUnderflowError",
    "__version__",
]
