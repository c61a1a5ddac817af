"""Optional PNG rendering for sweep rows. Kept off the default code path;
only the CLI's --plot flag imports this module."""

from __future__ import annotations

from pathlib import Path

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure


def _save(fig: Figure, path: Path) -> None:
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=120)


def render_sweep_plots(axis: str, rows, outdir) -> list[Path]:
    """Writes sweep_margin.png and sweep_depth.png next to the CSV data."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    xs = [float(r[0]) for r in rows]
    written = []

    fig = Figure(figsize=(5.5, 4.0))
    ax = fig.add_subplot(111)
    ax.plot(xs, [float(r[1]) for r in rows], "o-", label="margin_mean")
    ax.plot(xs, [float(r[2]) for r in rows], "s--", label="agree_rate")
    ax.set_xlabel(axis)
    ax.set_ylabel("probability")
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = outdir / "sweep_margin.png"
    _save(fig, path)
    written.append(path)

    fig = Figure(figsize=(5.5, 4.0))
    ax = fig.add_subplot(111)
    ax.plot(xs, [int(r[3]) for r in rows], "o-", label="measured depth")
    ax.plot(xs, [float(r[4]) for r in rows], "s--", label="paper bound")
    ax.set_xlabel(axis)
    ax.set_ylabel("oracle layers")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = outdir / "sweep_depth.png"
    _save(fig, path)
    written.append(path)
    return written
