"""Offline report writer: per-variable data files plus rendered figures.

For every published variable this writes the CSV and SVG exports next to
a matplotlib-rendered PNG of the default chart, plus a growth-indicator
summary table.  Meant for status reports and quick inspection; the HTTP
export endpoint remains the canonical download path.
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .app import Application
from .charts import ChartKind, ChartSpec
from .derive import MissingSourceError
from .export import to_csv, to_svg

log = logging.getLogger(__name__)


def render_figure(spec: ChartSpec, path: Path, width: float = 9.0, height: float = 5.0) -> None:
    """Draw a ChartSpec with matplotlib and save it."""
    fig, ax = plt.subplots(figsize=(width, height))
    x = list(range(len(spec.x_categories)))
    visible = [s for s in spec.series if s.visible]
    kind = ChartKind(spec.kind)

    if kind is ChartKind.PIE and visible:
        series = visible[0]
        values = [v if v is not None else 0.0 for v in series.values]
        ax.pie(values, labels=list(spec.x_categories), autopct="%1.1f%%")
    elif kind is ChartKind.LINE:
        for series in visible:
            ax.plot(x, [v for v in series.values], marker="o", label=series.name)
    elif kind is ChartKind.BAR:
        for offset, series in enumerate(visible):
            heights = [v if v is not None else 0.0 for v in series.values]
            positions = [xi + offset * 0.8 / max(len(visible), 1) for xi in x]
            ax.barh(positions, heights, height=0.8 / max(len(visible), 1), label=series.name)
        ax.set_yticks([xi + 0.4 for xi in x])
        ax.set_yticklabels(list(spec.x_categories))
    elif kind in (ChartKind.STACKED_COLUMN, ChartKind.STACKED_PERCENT_COLUMN):
        bottoms = [0.0] * len(x)
        for series in visible:
            if kind is ChartKind.STACKED_PERCENT_COLUMN:
                heights = [t.percent or 0.0 for t in series.tooltips]
            else:
                heights = [v if v is not None else 0.0 for v in series.values]
            ax.bar(x, heights, bottom=bottoms, label=series.name)
            bottoms = [b + h for b, h in zip(bottoms, heights)]
    else:  # column and column_drilldown
        group = 0.8 / max(len(visible), 1)
        for offset, series in enumerate(visible):
            heights = [v if v is not None else 0.0 for v in series.values]
            positions = [xi - 0.4 + (offset + 0.5) * group for xi in x]
            ax.bar(positions, heights, width=group, label=series.name)

    if kind is not ChartKind.PIE:
        if kind is not ChartKind.BAR:
            ax.set_xticks(x)
            ax.set_xticklabels(list(spec.x_categories), rotation=20, ha="right")
        if spec.unit:
            ax.set_ylabel(spec.unit)
        if len(visible) > 1:
            ax.legend(fontsize=8)
    ax.set_title(spec.title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def write_report(
    application: Application,
    out_dir: Path | str,
    numbers: list[int] | None = None,
) -> list[Path]:
    """Write data and figures for the requested (or all) published variables."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    entries = (
        [application.catalog.get(n) for n in numbers]
        if numbers
        else application.catalog.all_variables()
    )
    for entry in entries:
        try:
            spec, _ = application.variable_chart(entry)
        except MissingSourceError as exc:
            log.warning("skipping variable %s: %s", entry.number, exc)
            continue
        base = out / f"statistic-{entry.number}"
        csv_path = base.with_suffix(".csv")
        csv_path.write_text(to_csv(spec), encoding="utf-8", newline="")
        written.append(csv_path)
        try:
            svg_path = base.with_suffix(".svg")
            svg_path.write_text(to_svg(spec), encoding="utf-8")
            written.append(svg_path)
        except ValueError:
            pass  # kinds without an SVG rendering still get CSV and PNG
        png_path = base.with_suffix(".png")
        render_figure(spec, png_path)
        written.append(png_path)
    indicators_path = _write_indicators(application, out)
    if indicators_path:
        written.append(indicators_path)
    return written


def _write_indicators(application: Application, out: Path) -> Path | None:
    if application.catalog.indicators is None:
        return None
    try:
        results = application.indicator_results()
    except Exception as exc:
        log.warning("indicator summary skipped: %s", exc)
        return None
    path = out / "indicators.csv"
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\r\n")
        writer.writerow(["indicator", "variable", "window_start", "window_end", "net_change", "error"])
        for r in results:
            writer.writerow(
                [r.indicator, r.variable, r.window[0], r.window[1],
                 "" if r.value is None else r.value, r.error or ""]
            )
    return path
