"""Chart layouts for the eight experiment CSVs."""

from __future__ import annotations

from dataclasses import dataclass

from .csvdata import CsvTable


@dataclass(frozen=True)
class FigureSpec:
    experiment: str
    x_column: str
    series_columns: tuple[str, ...]
    kind: str  # "line" | "bar"
    output_filename: str
    group_column: str | None = None  # one series (or bar cluster) per group value
    threshold: float | None = None  # horizontal reference line
    x_label: str | None = None
    y_label: str | None = None

    def validate(self, table: CsvTable) -> None:
        needed = [self.x_column, *self.series_columns]
        if self.group_column:
            needed.append(self.group_column)
        missing = [c for c in needed if c not in table.columns]
        if missing:
            raise KeyError(
                f"{table.path}: column(s) {', '.join(missing)} required by the "
                f"{self.experiment} chart are missing"
            )


FIGURE_SPECS: dict[str, FigureSpec] = {
    "reputation-decay": FigureSpec(
        experiment="reputation-decay",
        x_column="t",
        series_columns=("with_freshness", "without_freshness", "local_only", "no_protection"),
        kind="line",
        output_filename="reputation-decay.png",
        threshold=0.5,
        x_label="interaction time",
        y_label="reputation value",
    ),
    "coalition-distribution": FigureSpec(
        experiment="coalition-distribution",
        x_column="coalition_rank",
        series_columns=("num_rsus",),
        kind="bar",
        output_filename="coalition-distribution.png",
        group_column="node_count",
        x_label="coalition (by size rank)",
        y_label="RSUs in coalition",
    ),
    "formation-time": FigureSpec(
        experiment="formation-time",
        x_column="nodes",
        series_columns=("utility_evaluations",),
        kind="line",
        output_filename="formation-time.png",
        group_column="rsus",
        x_label="RSU nodes",
        y_label="utility evaluations (work)",
    ),
    "misbehavior-sweep": FigureSpec(
        experiment="misbehavior-sweep",
        x_column="misbehavior_ratio",
        series_columns=(),  # filled per-file: depends on configured node counts
        kind="line",
        output_filename="misbehavior-sweep.png",
        threshold=0.5,
        x_label="misbehavior ratio",
        y_label="mean coalition reputation",
    ),
    "consensus-security": FigureSpec(
        experiment="consensus-security",
        x_column="delegates",
        series_columns=(),  # filled per-file: one per malicious probability
        kind="line",
        output_filename="consensus-security.png",
        x_label="validator group size",
        y_label="security probability",
    ),
    "market-demand": FigureSpec(
        experiment="market-demand",
        x_column="alpha",
        series_columns=(),  # filled per-file: one per price
        kind="line",
        output_filename="market-demand.png",
        x_label="latency sensitivity",
        y_label="bandwidth purchased (MHz)",
    ),
    "market-price": FigureSpec(
        experiment="market-price",
        x_column="alpha",
        series_columns=(),  # filled per-file: grid and closed form per cost
        kind="line",
        output_filename="market-price.png",
        x_label="latency sensitivity",
        y_label="unit bandwidth price",
    ),
    "market-utility": FigureSpec(
        experiment="market-utility",
        x_column="alpha",
        series_columns=(),  # filled per-file: one per cost
        kind="line",
        output_filename="market-utility.png",
        x_label="latency sensitivity",
        y_label="coalition utility",
    ),
}


def spec_for(table: CsvTable) -> FigureSpec:
    """Pick the chart layout for a table, resolving data-driven series lists."""
    name = table.experiment()
    if name not in FIGURE_SPECS:
        raise KeyError(f"{table.path}: no chart layout for experiment '{name}'")
    spec = FIGURE_SPECS[name]
    if not spec.series_columns:
        series = tuple(c for c in table.columns if c != spec.x_column)
        spec = FigureSpec(
            experiment=spec.experiment,
            x_column=spec.x_column,
            series_columns=series,
            kind=spec.kind,
            output_filename=spec.output_filename,
            group_column=spec.group_column,
            threshold=spec.threshold,
            x_label=spec.x_label,
            y_label=spec.y_label,
        )
    return spec
