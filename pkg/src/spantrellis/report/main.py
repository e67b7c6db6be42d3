"""Build curve figures and write them next to their CSV tables."""

from dataclasses import dataclass
from pathlib import Path

import pandas as pd
from matplotlib.axes import Axes
from matplotlib.figure import Figure

from .core._line import CurveRenderer
from .core.main import CURVE_COLUMNS, CurveDataContainer, CurveDataFactory, CurveProperties

__all__ = [
    "CURVE_COLUMNS",
    "CurveContainer",
    "CurveFactory",
    "CurveProperties",
    "write_curve_figure",
]


@dataclass(frozen=True)
class CurveContainer:
    """Bundle the objects produced when building a curve figure.

    Attributes:
        ax (Axes): Axes holding the line artists.
        fig (Figure): Figure associated with the axes.
        data_container (CurveDataContainer): Pivot that was drawn.
    """

    ax: Axes
    fig: Figure
    data_container: CurveDataContainer


class CurveFactory:
    """Orchestrate pivoting, drawing and labeling of one curve figure."""

    def __init__(self, ax: Axes, fig: Figure) -> None:
        self.ax = ax
        self.fig = fig

    def build(self, df: pd.DataFrame, properties: CurveProperties) -> CurveContainer:
        """Draw ``properties.metric`` against step, one line per series.

        Notes:
            - This method mutates the provided Axes by adding line artists.
        """
        data_container = CurveDataFactory(df).build(properties)
        CurveRenderer(ax=self.ax, pivot=data_container.pivot, width=properties.width).render()
        self.ax.set_title(properties.title or properties.metric)
        self.ax.set_xlabel("step")
        self.ax.set_ylabel(properties.ylabel or properties.metric)
        self.ax.spines[["top", "right"]].set_visible(False)
        return CurveContainer(ax=self.ax, fig=self.fig, data_container=data_container)


def write_curve_figure(df: pd.DataFrame, properties: CurveProperties, path: str | Path) -> Path:
    """Render one metric to a PNG file.

    The figure is created without pyplot, so no GUI backend is involved.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig = Figure(figsize=(6.4, 4.0))
    ax = fig.add_subplot()
    CurveFactory(ax=ax, fig=fig).build(df, properties)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    return path
