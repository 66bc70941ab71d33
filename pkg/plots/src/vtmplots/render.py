"""Render one experiment CSV into a fixed-size PNG chart."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .csvdata import CsvTable, read_table
from .specs import FigureSpec, spec_for

WIDTH_PX, HEIGHT_PX, DPI = 1200, 800, 100


def build_figure(table: CsvTable, spec: FigureSpec):
    """Assemble the matplotlib figure for a table; callers own closing it."""
    spec.validate(table)
    fig, ax = plt.subplots(figsize=(WIDTH_PX / DPI, HEIGHT_PX / DPI), dpi=DPI)
    x = table.column(spec.x_column)

    if spec.kind == "line":
        if spec.group_column:
            groups = table.column(spec.group_column)
            for group in sorted(set(groups)):
                idx = [i for i, g in enumerate(groups) if g == group]
                for series in spec.series_columns:
                    ys = table.column(series)
                    label = f"{spec.group_column}={group:g} {series}"
                    ax.plot(
                        [x[i] for i in idx],
                        [ys[i] for i in idx],
                        marker="o",
                        label=label,
                    )
        else:
            for series in spec.series_columns:
                ax.plot(x, table.column(series), marker="o", label=series)
    elif spec.kind == "bar":
        series = spec.series_columns[0]
        ys = table.column(series)
        groups = table.column(spec.group_column) if spec.group_column else [0.0] * len(x)
        distinct = sorted(set(groups))
        width = 0.8 / max(1, len(distinct))
        for slot, group in enumerate(distinct):
            idx = [i for i, g in enumerate(groups) if g == group]
            offsets = [x[i] + (slot - (len(distinct) - 1) / 2) * width for i in idx]
            label = f"{spec.group_column}={group:g}" if spec.group_column else series
            ax.bar(offsets, [ys[i] for i in idx], width=width, label=label)
    else:
        raise ValueError(f"unknown chart kind {spec.kind!r}")

    if spec.threshold is not None:
        ax.axhline(spec.threshold, color="tab:red", linestyle="--", label=f"threshold {spec.threshold:g}")
    ax.set_xlabel(spec.x_label or spec.x_column)
    ax.set_ylabel(spec.y_label or ", ".join(spec.series_columns))
    ax.set_title(spec.experiment)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    return fig


def render(csv_path: str | Path, out_dir: str | Path, spec: FigureSpec | None = None) -> Path:
    """Write the chart PNG for one CSV and return its path."""
    table = read_table(csv_path)
    if spec is None:
        spec = spec_for(table)
    fig = build_figure(table, spec)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    target = out / spec.output_filename
    try:
        fig.savefig(target, dpi=DPI)
    finally:
        plt.close(fig)
    return target
