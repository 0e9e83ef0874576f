"""Simulation traces: uniformly sampled time series, CSV round trip, summary.

A trace holds one column per recorded quantity.  CSV export is
deterministic byte-for-byte (shortest round-tripping float repr, LF line
endings) and the summary metrics computed from an exported-then-reimported
trace equal the in-memory ones exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ScenarioError

__all__ = ["Trace", "RunSummary", "TRACE_COLUMNS", "TRACE_UNITS",
           "export_trace", "import_trace", "summarize", "SPEED_THRESHOLD"]

TRACE_COLUMNS = (
    "t", "x", "v", "a", "p1", "p2", "T1", "T2",
    "m1_in", "m1_out", "m2_in", "m2_out", "ml1", "ml2",
    "F_f", "F_hs", "x_s1", "x_s2",
)
TRACE_UNITS = (
    "s", "m", "m/s", "m/s^2", "Pa", "Pa", "K", "K",
    "kg/s", "kg/s", "kg/s", "kg/s", "kg/s", "kg/s",
    "N", "N", "m", "m",
)

# Velocity magnitude below which the rod counts as not moving; used for the
# dead-time and reversal-count metrics and declared in the summary output.
SPEED_THRESHOLD = 1e-3  # m/s

# Minimum net travel of a direction block before it counts toward the
# reversal metric; filters out sub-millimetre seal-recoil blips.
TRAVEL_THRESHOLD = 1e-3  # m


@dataclass
class Trace:
    """Column store; the diagnostic chamber-mass columns are not exported."""

    columns: dict
    m1: np.ndarray | None = field(default=None, repr=False)
    m2: np.ndarray | None = field(default=None, repr=False)
    flow_cum1: np.ndarray | None = field(default=None, repr=False)
    flow_cum2: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        missing = [c for c in TRACE_COLUMNS if c not in self.columns]
        if missing:
            raise ScenarioError(f"trace is missing columns {missing}")
        n = len(self.columns["t"])
        for name in TRACE_COLUMNS:
            col = np.asarray(self.columns[name], dtype=float)
            if len(col) != n:
                raise ScenarioError(f"trace column '{name}' has wrong length")
            self.columns[name] = col

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        return len(self.columns["t"])

    @property
    def t(self) -> np.ndarray:
        return self.columns["t"]

    @property
    def x(self) -> np.ndarray:
        return self.columns["x"]

    @property
    def v(self) -> np.ndarray:
        return self.columns["v"]

    @property
    def p1(self) -> np.ndarray:
        return self.columns["p1"]

    @property
    def p2(self) -> np.ndarray:
        return self.columns["p2"]

    def equals(self, other: "Trace") -> bool:
        """Bit-for-bit equality of all canonical columns."""
        return all(
            np.array_equal(self.columns[c], other.columns[c]) for c in TRACE_COLUMNS
        )


def export_trace(trace: Trace, path) -> None:
    """Write the canonical columns as CSV with bracketed SI units."""
    header = ",".join(f"{c} [{u}]" for c, u in zip(TRACE_COLUMNS, TRACE_UNITS))
    cols = [trace.columns[c] for c in TRACE_COLUMNS]
    lines = [header]
    for i in range(len(trace)):
        lines.append(",".join(repr(float(col[i])) for col in cols))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def import_trace(path) -> Trace:
    """Read a CSV produced by export_trace."""
    text = Path(path).read_text("utf-8")
    rows = [line for line in text.split("\n") if line]
    if not rows:
        raise ScenarioError(f"{path}: empty trace file")
    names = [part.split(" [")[0].strip() for part in rows[0].split(",")]
    if tuple(names) != TRACE_COLUMNS:
        raise ScenarioError(f"{path}: unexpected trace header {names}")
    data = np.array([[float(cell) for cell in row.split(",")] for row in rows[1:]])
    if data.ndim != 2 or data.shape[1] != len(TRACE_COLUMNS):
        raise ScenarioError(f"{path}: malformed trace body")
    return Trace({name: data[:, i] for i, name in enumerate(TRACE_COLUMNS)})


@dataclass(frozen=True)
class RunSummary:
    """Figure-reading metrics, recomputable from the trace alone."""

    max_speed: float  # [m/s]
    dead_time: float | None  # [s], None when motion starts within one sample
    peak_p1: float  # [Pa]
    peak_p2: float  # [Pa]
    final_position: float  # [m]
    reversal_count: int  # direction changes of the rod
    displacement_amplitude: float  # max(x) - min(x) [m]
    speed_threshold: float  # [m/s], motion threshold the metrics used

    def to_dict(self) -> dict:
        return {
            "max_speed": self.max_speed,
            "dead_time": self.dead_time,
            "peak_p1": self.peak_p1,
            "peak_p2": self.peak_p2,
            "final_position": self.final_position,
            "reversal_count": self.reversal_count,
            "displacement_amplitude": self.displacement_amplitude,
            "speed_threshold": self.speed_threshold,
        }


def reversal_count(
    v: np.ndarray,
    x: np.ndarray | None = None,
    threshold: float = SPEED_THRESHOLD,
    travel: float = TRAVEL_THRESHOLD,
) -> int:
    """Number of rod direction changes.

    Samples with |v| <= threshold are ignored and the remaining samples are
    grouped into same-sign motion blocks; when positions are given, blocks
    whose net travel stays under ``travel`` are discarded (sub-millimetre
    bristle recoil, not motion).  The count is the number of sign flips
    between the surviving blocks, so one-way motion counts zero however it
    starts or stops.
    """
    moving = np.nonzero(np.abs(v) > threshold)[0]
    if moving.size == 0:
        return 0
    signs: list[float] = []
    block_start = moving[0]
    prev = moving[0]
    blocks: list[tuple[int, int, float]] = []
    for i in moving[1:]:
        if np.sign(v[i]) != np.sign(v[prev]) or i != prev + 1:
            blocks.append((block_start, prev, float(np.sign(v[prev]))))
            block_start = i
        prev = i
    blocks.append((block_start, prev, float(np.sign(v[prev]))))
    for start, end, sign in blocks:
        if x is not None:
            hi = min(end + 1, len(x) - 1)
            if abs(x[hi] - x[start]) < travel:
                continue
        if signs and signs[-1] == sign:
            continue
        signs.append(sign)
    return max(len(signs) - 1, 0)


def summarize(trace: Trace, speed_threshold: float = SPEED_THRESHOLD) -> RunSummary:
    if len(trace) == 0:
        raise ScenarioError("cannot summarise an empty trace")
    t = trace["t"]
    x = trace["x"]
    v = trace["v"]
    speed = np.abs(v)
    moving = np.nonzero(speed > speed_threshold)[0]
    if moving.size and moving[0] >= 1:
        dead_time = float(t[moving[0]])
    else:
        dead_time = None
    return RunSummary(
        max_speed=float(speed.max()),
        dead_time=dead_time,
        peak_p1=float(trace["p1"].max()),
        peak_p2=float(trace["p2"].max()),
        final_position=float(x[-1]),
        reversal_count=reversal_count(v, x, speed_threshold),
        displacement_amplitude=float(x.max() - x.min()),
        speed_threshold=speed_threshold,
    )
