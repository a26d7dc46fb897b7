"""Figures rendered from the plot data of a report."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .report import LabReport  # noqa: E402

_STYLE = {
    "figure.figsize": (5.0, 3.4),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
    "savefig.bbox": "tight",
}


def _columns(header, rows):
    cols = {h: [] for h in header}
    for row in rows:
        for h, v in zip(header, row):
            cols[h].append(float("nan") if v == "" else v)
    return cols


def _ladder(ax, cols, xkey):
    for key, vals in cols.items():
        if key != xkey:
            ax.plot(cols[xkey], vals, marker="o", ms=3, label=key)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("truncation N")
    ax.legend(frameon=False)


def _by_symbol(ax, cols, xkey):
    for key, vals in cols.items():
        if key != xkey:
            ax.plot(cols[xkey], vals, marker=".", ls="none", label=key)
    ax.set_xlabel("symbol index")
    ax.legend(frameon=False, fontsize=7)


def render(report: LabReport, out: str | Path) -> list[Path]:
    """One PNG per plot data table under ``out/figures``."""
    fig_dir = Path(out) / "figures"
    fig_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    with plt.rc_context(_STYLE):
        for name, (header, rows) in sorted(report.plotdata.items()):
            if not rows:
                continue
            cols = _columns(header, rows)
            fig, ax = plt.subplots()
            if header[0] == "N":
                _ladder(ax, cols, "N")
            else:
                _by_symbol(ax, cols, header[0])
            ax.set_title(name.replace("_", " "))
            p = fig_dir / f"{name}.png"
            fig.savefig(p, metadata={"Software": None})
            plt.close(fig)
            paths.append(p)
    return paths
