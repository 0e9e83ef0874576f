"""Figure emission: three stacked panels (position, velocity, pressures)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .trace import Trace

__all__ = ["emit_plot"]


def emit_plot(trace: Trace, path, title: str = "") -> Path:
    """Write a self-contained vector plot of the run to ``path``.

    Creates the parent directory on demand; the format follows the file
    suffix (SVG by default elsewhere in the package).
    """
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)

    t = trace.t
    fig, (ax_x, ax_v, ax_p) = plt.subplots(3, 1, sharex=True, figsize=(7.0, 7.5))
    ax_x.plot(t, trace.x * 1e3, color="tab:blue")
    ax_x.set_ylabel("position [mm]")
    ax_v.plot(t, trace.v, color="tab:orange")
    ax_v.set_ylabel("velocity [m/s]")
    ax_p.plot(t, trace.p1 * 1e-5, label="chamber 1", color="tab:green")
    ax_p.plot(t, trace.p2 * 1e-5, label="chamber 2", color="tab:red")
    ax_p.set_ylabel("pressure [bar]")
    ax_p.set_xlabel("time [s]")
    ax_p.legend(loc="best")
    for ax in (ax_x, ax_v, ax_p):
        ax.grid(True, alpha=0.3)
    if title:
        ax_x.set_title(title)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    return out
