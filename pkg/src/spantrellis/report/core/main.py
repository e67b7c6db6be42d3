"""Pivot long-format training curves into chart-ready tables.

Trainers record curves as long tables: one row per (step, metric,
series) observation. A figure shows one metric against the step with one
line per series, so the table is filtered to the metric and pivoted with
steps as the index and series as columns. Metrics observed only at eval
steps leave gaps that the drawers skip rather than fill.
"""

from dataclasses import dataclass

import pandas as pd

CURVE_COLUMNS = ["step", "metric", "value", "series"]


@dataclass(frozen=True)
class CurveProperties:
    """What to plot from a long curve table.

    Attributes:
        metric (str): Value of the ``metric`` column to keep.
        title (str): Axes title.
        ylabel (str | None): Y-axis label; defaults to the metric name.
        width (float): Line width.
    """

    metric: str
    title: str = ""
    ylabel: str | None = None
    width: float = 1.5


@dataclass(frozen=True)
class CurveDataContainer:
    """Pivot with steps as index and one column per series."""

    pivot: pd.DataFrame
    metric: str


class CurveDataFactory:
    """Build the pivot of one metric from a long curve table."""

    def __init__(self, df: pd.DataFrame) -> None:
        """
        Args:
            df (pd.DataFrame): Long table with ``CURVE_COLUMNS``.
        """
        self.df = df

    def build(self, properties: CurveProperties) -> CurveDataContainer:
        """
        Raises:
            ValueError: If columns are missing or the metric has no rows.
        """
        missing = [col for col in CURVE_COLUMNS if col not in self.df.columns]
        if missing:
            raise ValueError(f"Columns not found in DataFrame: {missing}")

        rows = self.df[self.df["metric"] == properties.metric].dropna(subset=["value"])
        if rows.empty:
            available = sorted(self.df["metric"].unique().tolist())
            raise ValueError(f"No rows for metric '{properties.metric}'. Available metrics: {available}")

        pivot = rows.pivot_table(index="step", columns="series", values="value", aggfunc="mean")
        return CurveDataContainer(pivot=pivot.sort_index(), metric=properties.metric)
