"""Deterministic downloadable renderings of a chart: CSV, SVG and a table.

All three emitters are pure functions of the ChartSpec, byte-stable
across runs and platforms.  Numbers print with up to six fractional
digits, trailing zeros trimmed, '.' as decimal separator.

CSV follows RFC 4180 (comma separated, CRLF line ends, quote doubling,
UTF-8 without a byte-order mark) and always contains every series; SVG
renders only the visible ones, one shape per visible data point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .charts import ChartKind, ChartSeries, ChartSpec

SVG_KINDS = (
    ChartKind.LINE,
    ChartKind.COLUMN,
    ChartKind.STACKED_COLUMN,
    ChartKind.STACKED_PERCENT_COLUMN,
    ChartKind.COLUMN_DRILLDOWN,  # renders as a plain column chart
    ChartKind.PIE,
)

PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc949", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)


def format_number(value: float) -> str:
    """Up to 6 fractional digits, trailing zeros trimmed, '.' separator."""
    text = f"{value:.6f}".rstrip("0").rstrip(".")
    if text in ("-0", ""):
        return "0"
    return text


# -- CSV ----------------------------------------------------------------------


def _csv_field(text: str) -> str:
    if any(ch in text for ch in ',"\r\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def to_csv(spec: ChartSpec) -> str:
    """RFC 4180 text: header of x label plus series names, one row per x."""
    lines = [",".join(_csv_field(h) for h in [spec.x_label, *(s.name for s in spec.series)])]
    for i, x in enumerate(spec.x_categories):
        row = [x]
        for series in spec.series:
            value = series.values[i]
            row.append("" if value is None else format_number(value))
        lines.append(",".join(_csv_field(f) for f in row))
    return "\r\n".join(lines) + "\r\n"


# -- tabular form -------------------------------------------------------------


@dataclass(frozen=True)
class TableData:
    headers: tuple[str, ...]
    rows: tuple[tuple[object, ...], ...]


def to_table(spec: ChartSpec) -> TableData:
    """The chart's values as structured rows; agrees with to_csv cell for cell."""
    headers = (spec.x_label,) + tuple(s.name for s in spec.series)
    rows = tuple(
        (x,) + tuple(series.values[i] for series in spec.series)
        for i, x in enumerate(spec.x_categories)
    )
    return TableData(headers, rows)


# -- SVG ----------------------------------------------------------------------


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def to_svg(spec: ChartSpec, width: int = 720, height: int = 420) -> str:
    """A standalone SVG 1.1 document; byte-deterministic for equal inputs.

    Column-with-drilldown renders as a plain column chart; hidden series
    are omitted entirely.
    """
    if width <= 0 or height <= 0:
        raise ValueError("width and height must be positive")
    kind = ChartKind(spec.kind)
    if kind not in SVG_KINDS:
        raise ValueError(f"chart kind '{kind.value}' has no SVG rendering")

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<title>{_esc(spec.title)}</title>',
        f'<text class="title" x="{width // 2}" y="20" text-anchor="middle" '
        f'font-size="15" font-family="sans-serif">{_esc(spec.title)}</text>',
    ]
    if kind is ChartKind.PIE:
        parts.extend(_pie_body(spec, width, height))
    else:
        parts.extend(_axes_body(spec, kind, width, height))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


@dataclass(frozen=True)
class _Frame:
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def w(self) -> float:
        return self.x1 - self.x0

    @property
    def h(self) -> float:
        return self.y1 - self.y0


def _series_color(spec: ChartSpec, series: ChartSeries) -> str:
    index = [s.name for s in spec.series].index(series.name)
    return PALETTE[index % len(PALETTE)]


def _value_range(spec: ChartSpec, kind: ChartKind) -> tuple[float, float]:
    if kind is ChartKind.STACKED_PERCENT_COLUMN:
        return 0.0, 100.0
    visible = spec.visible_series
    if kind is ChartKind.STACKED_COLUMN:
        tops, bottoms = [0.0], [0.0]
        for i in range(len(spec.x_categories)):
            present = [s.values[i] for s in visible if s.values[i] is not None]
            tops.append(sum(v for v in present if v > 0))
            bottoms.append(sum(v for v in present if v < 0))
        low, high = min(bottoms), max(tops)
    else:
        cells = [v for s in visible for v in s.values if v is not None]
        low = min([0.0, *cells])
        high = max([0.0, *cells])
    if math.isclose(low, high):
        high = low + 1.0
    return low, high


def _y_to_px(value: float, low: float, high: float, frame: _Frame) -> float:
    return frame.y1 - (value - low) / (high - low) * frame.h


def _axes_body(spec: ChartSpec, kind: ChartKind, width: int, height: int) -> list[str]:
    frame = _Frame(62.0, 42.0, width - 18.0, height - 46.0)
    low, high = _value_range(spec, kind)
    out = []
    if spec.unit:
        out.append(
            f'<text class="unit" x="{_f(frame.x0)}" y="{_f(frame.y0 - 8)}" '
            f'font-size="10" font-family="sans-serif">{_esc(spec.unit)}</text>'
        )
    # y axis with five evenly spaced tick labels
    out.append(
        f'<line class="axis" x1="{_f(frame.x0)}" y1="{_f(frame.y0)}" '
        f'x2="{_f(frame.x0)}" y2="{_f(frame.y1)}" stroke="#333"/>'
    )
    for i in range(5):
        tick = low + (high - low) * i / 4
        y = _y_to_px(tick, low, high, frame)
        out.append(
            f'<text class="ytick" x="{_f(frame.x0 - 6)}" y="{_f(y + 3)}" text-anchor="end" '
            f'font-size="10" font-family="sans-serif">{format_number(tick)}</text>'
        )
    # x axis sits on the zero line when the range crosses zero
    zero_y = _y_to_px(max(min(0.0, high), low), low, high, frame)
    out.append(
        f'<line class="axis" x1="{_f(frame.x0)}" y1="{_f(zero_y)}" '
        f'x2="{_f(frame.x1)}" y2="{_f(zero_y)}" stroke="#333"/>'
    )
    slot = frame.w / max(len(spec.x_categories), 1)
    for i, x_label in enumerate(spec.x_categories):
        center = frame.x0 + slot * (i + 0.5)
        out.append(
            f'<text class="xtick" x="{_f(center)}" y="{_f(frame.y1 + 16)}" text-anchor="middle" '
            f'font-size="10" font-family="sans-serif">{_esc(x_label)}</text>'
        )

    if kind is ChartKind.LINE:
        out.extend(_line_shapes(spec, frame, slot, low, high))
    elif kind is ChartKind.STACKED_COLUMN:
        out.extend(_stacked_shapes(spec, frame, slot, low, high, percent=False))
    elif kind is ChartKind.STACKED_PERCENT_COLUMN:
        out.extend(_stacked_shapes(spec, frame, slot, low, high, percent=True))
    else:  # column and column_drilldown
        out.extend(_column_shapes(spec, frame, slot, low, high))
    out.extend(_legend(spec, frame))
    return out


def _legend(spec: ChartSpec, frame: _Frame) -> list[str]:
    out = []
    x = frame.x0
    for series in spec.visible_series:
        color = _series_color(spec, series)
        out.append(
            f'<rect class="legend" x="{_f(x)}" y="{_f(frame.y1 + 26)}" width="9" height="9" '
            f'fill="{color}"/>'
        )
        out.append(
            f'<text class="legend-label" x="{_f(x + 12)}" y="{_f(frame.y1 + 34)}" '
            f'font-size="10" font-family="sans-serif">{_esc(series.name)}</text>'
        )
        x += 14 + 6 * len(series.name)
    return out


def _line_shapes(spec, frame, slot, low, high) -> list[str]:
    out = []
    for series in spec.visible_series:
        color = _series_color(spec, series)
        points = []
        for i, value in enumerate(series.values):
            if value is None:
                continue
            cx = frame.x0 + slot * (i + 0.5)
            cy = _y_to_px(value, low, high, frame)
            points.append((cx, cy))
        if len(points) > 1:
            path = " ".join(f"{_f(px)},{_f(py)}" for px, py in points)
            out.append(
                f'<polyline class="series" points="{path}" fill="none" '
                f'stroke="{color}" stroke-width="2"/>'
            )
        for cx, cy in points:
            out.append(
                f'<circle class="dp" cx="{_f(cx)}" cy="{_f(cy)}" r="3" fill="{color}"/>'
            )
    return out


def _column_shapes(spec, frame, slot, low, high) -> list[str]:
    out = []
    visible = spec.visible_series
    if not visible:
        return out
    group_width = slot * 0.8
    bar_width = group_width / len(visible)
    zero_y = _y_to_px(max(min(0.0, high), low), low, high, frame)
    for i in range(len(spec.x_categories)):
        group_left = frame.x0 + slot * i + slot * 0.1
        for j, series in enumerate(visible):
            value = series.values[i]
            if value is None:
                continue
            value_y = _y_to_px(value, low, high, frame)
            top = min(value_y, zero_y)
            h = abs(value_y - zero_y)
            out.append(
                f'<rect class="dp" x="{_f(group_left + j * bar_width)}" y="{_f(top)}" '
                f'width="{_f(bar_width)}" height="{_f(h)}" '
                f'fill="{_series_color(spec, series)}"/>'
            )
    return out


def _stacked_shapes(spec, frame, slot, low, high, percent: bool) -> list[str]:
    out = []
    bar_ratio = 0.6
    for i in range(len(spec.x_categories)):
        left = frame.x0 + slot * i + slot * (1 - bar_ratio) / 2
        up_base = 0.0
        down_base = 0.0
        for series in spec.visible_series:
            if series.values[i] is None:
                continue
            if percent:
                share = series.tooltips[i].percent or 0.0
                segment = max(share, 0.0)
            else:
                segment = series.values[i]
            if segment >= 0:
                y_top = _y_to_px(up_base + segment, low, high, frame)
                y_bottom = _y_to_px(up_base, low, high, frame)
                up_base += segment
            else:
                y_top = _y_to_px(down_base, low, high, frame)
                y_bottom = _y_to_px(down_base + segment, low, high, frame)
                down_base += segment
            out.append(
                f'<rect class="dp" x="{_f(left)}" y="{_f(min(y_top, y_bottom))}" '
                f'width="{_f(slot * bar_ratio)}" height="{_f(abs(y_bottom - y_top))}" '
                f'fill="{_series_color(spec, series)}"/>'
            )
    return out


def _pie_body(spec: ChartSpec, width: int, height: int) -> list[str]:
    out = []
    visible = spec.visible_series
    if not visible:
        return out
    series = visible[0]
    cx, cy = width / 2, (height + 26) / 2
    radius = min(width, height - 52) * 0.38
    total = sum(v for v in series.values if v is not None)
    angle = -math.pi / 2  # start at 12 o'clock, clockwise
    legend_y = 40.0
    for i, value in enumerate(series.values):
        if value is None:
            continue
        color = PALETTE[i % len(PALETTE)]
        if total <= 0 or value <= 0:
            out.append(f'<path class="dp" d="M{_f(cx)},{_f(cy)} Z" fill="{color}"/>')
        else:
            fraction = value / total
            sweep = fraction * 2 * math.pi
            x1 = cx + radius * math.cos(angle)
            y1 = cy + radius * math.sin(angle)
            if fraction >= 1.0 - 1e-12:
                out.append(
                    f'<circle class="dp" cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(radius)}" '
                    f'fill="{color}"/>'
                )
            else:
                x2 = cx + radius * math.cos(angle + sweep)
                y2 = cy + radius * math.sin(angle + sweep)
                large = 1 if sweep > math.pi else 0
                out.append(
                    f'<path class="dp" d="M{_f(cx)},{_f(cy)} L{_f(x1)},{_f(y1)} '
                    f'A{_f(radius)},{_f(radius)} 0 {large} 1 {_f(x2)},{_f(y2)} Z" '
                    f'fill="{color}"/>'
                )
            angle += sweep
        out.append(
            f'<text class="slice-label" x="18" y="{_f(legend_y)}" font-size="10" '
            f'font-family="sans-serif">{_esc(spec.x_categories[i])}</text>'
        )
        legend_y += 14
    return out


def _f(value: float) -> str:
    return format_number(round(value, 3))


def visible_point_count(spec: ChartSpec) -> int:
    """How many data-point shapes an SVG rendering must contain."""
    return sum(
        1 for s in spec.visible_series for v in s.values if v is not None
    )
