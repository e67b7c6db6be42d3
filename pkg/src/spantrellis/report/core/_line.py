"""Draw single- and multi-series curves onto an Axes.

A curve pivot with one column is drawn as a single unlabeled line; with
several columns each series gets its own labeled line and the axes get a
legend. Missing observations (a series evaluated on a different step
grid) are skipped per series, so sparse eval curves stay connected.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Literal

import numpy as np
import pandas as pd
from matplotlib.axes import Axes


@dataclass(frozen=True)
class CurveSeries:
    """Steps and values of one series with missing points removed."""

    label: str
    steps: np.ndarray
    values: np.ndarray

    @classmethod
    def from_column(cls, pivot: pd.DataFrame, column: object) -> "CurveSeries":
        values = pivot[column].astype(float).to_numpy(float)
        keep = ~np.isnan(values)
        return cls(
            label=str(column),
            steps=pivot.index.to_numpy(float)[keep],
            values=values[keep],
        )


@dataclass(frozen=True)
class CurveLineProperties:
    ax: Axes
    series: list[CurveSeries]
    width: float


class CurveDrawerBase(ABC):
    """Define the interface for curve drawers."""

    def __init__(self, properties: CurveLineProperties) -> None:
        """
        Args:
            properties (CurveLineProperties): Target axes and series.
        """
        self.properties = properties

    @abstractmethod
    def draw(self) -> None:
        """Draw the curves on the provided axes."""
        ...


class SingleCurveDrawer(CurveDrawerBase):
    def draw(self) -> None:
        series = self.properties.series[0]
        self.properties.ax.plot(series.steps, series.values, linewidth=self.properties.width)


class MultiCurveDrawer(CurveDrawerBase):
    """One labeled line per series, then a legend."""

    def draw(self) -> None:
        for series in self.properties.series:
            self.properties.ax.plot(
                series.steps,
                series.values,
                linewidth=self.properties.width,
                label=series.label,
            )
        self.properties.ax.legend(frameon=False)


class CurveDrawerSelector:
    """Select a curve drawer for single vs. multi-series pivots."""

    def __init__(self, properties: CurveLineProperties) -> None:
        self.properties = properties

    def select(self, select: Literal["single", "multi"]) -> CurveDrawerBase:
        if select == "multi":
            return MultiCurveDrawer(properties=self.properties)
        return SingleCurveDrawer(properties=self.properties)


class CurveRenderer:
    """Render a curve pivot onto an Axes."""

    def __init__(self, ax: Axes, pivot: pd.DataFrame, width: float) -> None:
        """
        Args:
            ax (Axes): Target axes to draw on (no figure creation).
            pivot (pd.DataFrame): Steps by series.
            width (float): Line width.
        """
        self.ax = ax
        self.pivot = pivot
        self.width = width

    def render(self) -> None:
        series = [CurveSeries.from_column(self.pivot, c) for c in self.pivot.columns]
        select = "multi" if len(series) > 1 else "single"
        properties = CurveLineProperties(ax=self.ax, series=series, width=self.width)
        CurveDrawerSelector(properties=properties).select(select=select).draw()
