"""Renderer-independent chart specifications.

A ChartSpec carries everything a renderer needs: x categories, series
with visibility flags, per-point tooltips (absolute value, and for
percentage kinds the plotted share), optional drilldown routes and the
snapshot provenance of the data.  Colors, fonts and layout belong to
renderers, not here.

Percent shares are always computed over the currently visible series, so
hiding a series rescales the rest.  Columns whose visible total is not
positive are flagged as degenerate and plot as zero.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, Mapping

from .cube import Cell, DataCube

if TYPE_CHECKING:  # pragma: no cover
    from .catalog import VariableEntry


class ChartError(ValueError):
    pass


class ChartKind(str, Enum):
    LINE = "line"
    BAR = "bar"
    COLUMN = "column"
    STACKED_COLUMN = "stacked_column"
    STACKED_PERCENT_COLUMN = "stacked_percent_column"
    COLUMN_DRILLDOWN = "column_drilldown"
    PIE = "pie"


PERCENT_KINDS = (ChartKind.STACKED_PERCENT_COLUMN, ChartKind.PIE)


@dataclass(frozen=True)
class TooltipEntry:
    absolute: Cell
    percent: float | None = None


@dataclass(frozen=True)
class ChartSeries:
    name: str
    values: tuple[Cell, ...]
    visible: bool = True
    tooltips: tuple[TooltipEntry, ...] = ()


@dataclass(frozen=True)
class Route:
    variable: int
    filter: Mapping[str, str]


@dataclass(frozen=True)
class ChartSpec:
    variable: int
    kind: ChartKind
    title: str
    x_label: str
    x_categories: tuple[str, ...]
    series: tuple[ChartSeries, ...]
    unit: str | None = None
    provenance: tuple[tuple[str, int], ...] = ()
    drilldown: Mapping[str, Route] | None = None
    degenerate_columns: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        names = set()
        for s in self.series:
            if len(s.values) != len(self.x_categories):
                raise ChartError(
                    f"series '{s.name}' has {len(s.values)} values for "
                    f"{len(self.x_categories)} x categories"
                )
            if s.name in names:
                raise ChartError(f"duplicate series name '{s.name}'")
            names.add(s.name)

    def series_named(self, name: str) -> ChartSeries:
        for s in self.series:
            if s.name == name:
                return s
        raise ChartError(f"chart has no series named '{name}'")

    @property
    def visible_series(self) -> tuple[ChartSeries, ...]:
        return tuple(s for s in self.series if s.visible)


def build_chart(
    cube: DataCube,
    entry: "VariableEntry",
    kind: ChartKind,
    x_dim: str,
    series_dim: str | None = None,
    provenance: tuple[tuple[str, int], ...] = (),
) -> ChartSpec:
    """Shape a cube into a chart of the requested kind for a catalog variable."""
    kind = ChartKind(kind)
    if kind not in alternative_kinds(entry):
        raise ChartError(
            f"variable {entry.number} does not offer chart kind '{kind.value}'"
        )
    table = cube.to_series(x_dim, series_dim)
    if kind is ChartKind.PIE and len(table.series) != 1:
        raise ChartError(f"pie charts need a single series, got {len(table.series)}")
    series = tuple(
        ChartSeries(
            name=row.name if row.name is not None else entry.title,
            values=row.values,
            visible=True,
            tooltips=tuple(TooltipEntry(v) for v in row.values),
        )
        for row in table.series
    )
    drilldown = None
    if kind is ChartKind.COLUMN_DRILLDOWN:
        target = entry.drilldown_variable or entry.number
        x_dimension = cube.dimension(x_dim)
        drilldown = {
            cat.label: Route(target, {x_dim: cat.id}) for cat in x_dimension.categories
        }
    spec = ChartSpec(
        variable=entry.number,
        kind=kind,
        title=entry.title,
        x_label=table.x.label,
        x_categories=table.x_labels,
        series=series,
        unit=cube.unit or entry.unit,
        provenance=tuple(provenance),
        drilldown=drilldown,
    )
    return _with_percentages(spec)


def toggle_series(spec: ChartSpec, name: str) -> ChartSpec:
    """Flip one series' visibility; percentage kinds rescale over what remains."""
    target = spec.series_named(name)
    series = tuple(
        replace(s, visible=not s.visible) if s.name == target.name else s
        for s in spec.series
    )
    return _with_percentages(replace(spec, series=series))


def drilldown_target(spec: ChartSpec, x_category: str) -> Route:
    """Route behind a drilldown-enabled x category."""
    if not spec.drilldown or x_category not in spec.drilldown:
        raise ChartError(f"no drilldown is configured for '{x_category}'")
    return spec.drilldown[x_category]


def alternative_kinds(entry: "VariableEntry") -> tuple[ChartKind, ...]:
    """Chart kinds a variable can be viewed as: default first, no duplicates."""
    return (entry.default_chart,) + tuple(entry.alternative_charts)


def _with_percentages(spec: ChartSpec) -> ChartSpec:
    """Recompute plotted shares over the visible series.

    For stacked percentage columns shares are per x position across the
    visible series; for pies they are across the x positions of the
    single visible series.  Hidden series carry no percent.  Absolutes
    are never touched.
    """
    if spec.kind not in PERCENT_KINDS:
        return replace(
            spec,
            series=tuple(
                replace(s, tooltips=tuple(TooltipEntry(v) for v in s.values))
                for s in spec.series
            ),
            degenerate_columns=(),
        )

    if spec.kind is ChartKind.STACKED_PERCENT_COLUMN:
        totals = []
        for i in range(len(spec.x_categories)):
            totals.append(
                sum(
                    s.values[i]
                    for s in spec.series
                    if s.visible and s.values[i] is not None
                )
            )
        degenerate = tuple(
            x for x, total in zip(spec.x_categories, totals) if total <= 0
        )
        series = []
        for s in spec.series:
            if not s.visible:
                series.append(replace(s, tooltips=tuple(TooltipEntry(v) for v in s.values)))
                continue
            tooltips = []
            for value, total in zip(s.values, totals):
                if value is None:
                    tooltips.append(TooltipEntry(None))
                elif total <= 0:
                    tooltips.append(TooltipEntry(value, 0.0))
                else:
                    tooltips.append(TooltipEntry(value, value / total * 100.0))
            series.append(replace(s, tooltips=tuple(tooltips)))
        return replace(spec, series=tuple(series), degenerate_columns=degenerate)

    # pie: shares across the x positions of the single visible series
    series = []
    degenerate: tuple[str, ...] = ()
    for s in spec.series:
        if not s.visible:
            series.append(replace(s, tooltips=tuple(TooltipEntry(v) for v in s.values)))
            continue
        total = sum(v for v in s.values if v is not None)
        if total <= 0:
            degenerate = spec.x_categories
            tooltips = tuple(
                TooltipEntry(v, None if v is None else 0.0) for v in s.values
            )
        else:
            tooltips = tuple(
                TooltipEntry(v, None if v is None else v / total * 100.0)
                for v in s.values
            )
        series.append(replace(s, tooltips=tooltips))
    return replace(spec, series=tuple(series), degenerate_columns=degenerate)


# -- canonical serialization --------------------------------------------------
#
# The wire form consumed by both the web UI and the SVG exporter; field
# order is part of the contract.


def spec_to_dict(spec: ChartSpec) -> dict:
    return {
        "variable": spec.variable,
        "kind": spec.kind.value,
        "title": spec.title,
        "unit": spec.unit,
        "x_label": spec.x_label,
        "x_categories": list(spec.x_categories),
        "series": [
            {
                "name": s.name,
                "visible": s.visible,
                "values": list(s.values),
                "tooltips": [
                    {"absolute": t.absolute, "percent": t.percent} for t in s.tooltips
                ],
            }
            for s in spec.series
        ],
        "drilldown": (
            None
            if spec.drilldown is None
            else {
                x: {"variable": route.variable, "filter": dict(route.filter)}
                for x, route in spec.drilldown.items()
            }
        ),
        "degenerate_columns": list(spec.degenerate_columns),
        "provenance": [[source, version] for source, version in spec.provenance],
    }


def spec_from_dict(doc: Mapping) -> ChartSpec:
    return ChartSpec(
        variable=doc["variable"],
        kind=ChartKind(doc["kind"]),
        title=doc["title"],
        x_label=doc["x_label"],
        x_categories=tuple(doc["x_categories"]),
        series=tuple(
            ChartSeries(
                name=s["name"],
                values=tuple(s["values"]),
                visible=s["visible"],
                tooltips=tuple(
                    TooltipEntry(t["absolute"], t.get("percent")) for t in s["tooltips"]
                ),
            )
            for s in doc["series"]
        ),
        unit=doc.get("unit"),
        provenance=tuple((p[0], p[1]) for p in doc.get("provenance", [])),
        drilldown=(
            None
            if doc.get("drilldown") is None
            else {
                x: Route(r["variable"], dict(r["filter"]))
                for x, r in doc["drilldown"].items()
            }
        ),
        degenerate_columns=tuple(doc.get("degenerate_columns", [])),
    )
