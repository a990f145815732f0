"""Matplotlib rendering of curve tables to image files."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .tables import is_log_grid  # noqa: E402

_LINESTYLES = {"solid": "-", "dashed": "--", "dotted": ":", "dashdot": "-."}


def plot_table(table, path, *, columns=None, title=None, xlabel=None, ylabel=None,
               error_columns=None):
    """Write a line plot of ``table`` to ``path`` (format from the suffix).

    Styles come from ``table.metadata["styles"]`` when present. For each
    name in ``error_columns`` mapping ``column -> se_column`` a +-2 SE band
    is shaded.
    """
    columns = list(columns or [n for n in table.names[1:] if not n.endswith("_se")])
    styles = table.metadata.get("styles", {})
    xs = table.column(table.names[0])
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for name in columns:
        ys = table.column(name)
        ax.plot(xs, ys, _LINESTYLES.get(styles.get(name), "-"), label=name)
        se_name = (error_columns or {}).get(name)
        if se_name:
            se = table.column(se_name)
            ax.fill_between(xs, [y - 2 * e for y, e in zip(ys, se)],
                            [y + 2 * e for y, e in zip(ys, se)], alpha=0.25, lw=0)
    if table.metadata.get("grid") == "log" or is_log_grid(xs):
        ax.set_xscale("log")
        if all(v > 0 for n in columns for v in table.column(n)):
            ax.set_yscale("log")
    ax.set_xlabel(xlabel or table.names[0])
    if ylabel:
        ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None} if str(path).endswith((".svg", ".pdf")) else None)
    plt.close(fig)
