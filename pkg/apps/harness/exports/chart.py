"""
Log-log convergence chart using matplotlib.

Plots the converged errors of a study against h with the fitted rate
in each legend entry. Returned as PNG bytes.
"""

import io
import logging
from pathlib import Path

import matplotlib
import matplotlib.pyplot as plt

from mafem.exceptions import ArtifactWriteError

matplotlib.use("Agg")

logger = logging.getLogger(__name__)

SERIES = (
    ("err_u_L2", "‖u − u_h‖ L2", "#8B7355"),
    ("err_u_H1", "‖u − u_h‖ H1", "#C4A35A"),
    ("err_sigma_L2", "‖D²u − σ_h‖ L2", "#7D8471"),
)


def render_convergence_chart(table) -> bytes | None:
    """
    Render the errors of a ConvergenceTable.

    Args:
        table: The study to plot.

    Returns:
        PNG bytes, or None if fewer than two levels converged or no
        error column is available.
    """
    if len(table.converged_reports) < 2:
        return None
    series = []
    for name, label, color in SERIES:
        h, errors = table.column(name)
        if h.size >= 2 and not table.is_exact(name) and (errors > 0).all():
            series.append((name, label, color, h, errors))
    if not series:
        return None
    rates = table.rates()

    # Project colors
    color_dark = "#4A4540"
    color_bg = "#FAF9F7"
    color_grid = "#E5E0D8"

    fig, ax = plt.subplots(figsize=(7, 4.2))
    fig.patch.set_facecolor(color_bg)
    ax.set_facecolor(color_bg)

    for name, label, color, h, errors in series:
        ax.loglog(
            h,
            errors,
            color=color,
            linewidth=2,
            marker="o",
            markersize=5,
            label=f"{label} (rate {rates[name]:.2f})",
            zorder=2,
        )

    ax.set_title(f"{table.label}, P{table.degree}", fontsize=12, color=color_dark, pad=10)
    ax.set_xlabel("h", fontsize=10, color=color_dark)
    ax.set_ylabel("error", fontsize=10, color=color_dark)
    ax.tick_params(axis="both", which="both", colors=color_dark, labelsize=9)
    ax.grid(which="major", color=color_grid, linewidth=0.8)
    ax.set_axisbelow(True)
    ax.invert_xaxis()
    ax.legend(fontsize=9, frameon=False, labelcolor=color_dark)

    for spine in ax.spines.values():
        spine.set_visible(False)

    plt.tight_layout()

    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=150, bbox_inches="tight")
    plt.close(fig)
    return buf.getvalue()


def write_convergence_chart(table, path: Path) -> Path | None:
    """Write the chart if there is something to plot; returns the path or None."""
    png = render_convergence_chart(table)
    if png is None:
        logger.info("Nothing to plot for %s", table.label)
        return None
    path = Path(path)
    try:
        path.write_bytes(png)
    except OSError as e:
        raise ArtifactWriteError(f"Could not write chart to {path}: {e}", path=path) from e
    return path
