// SVG DOM renderer for chart specs: legend with toggle clicks, hover
// tooltips showing percent and absolute, and drilldown navigation on
// column charts that carry routes.

import type { ChartSpec, ChartSeries, DrilldownRoute } from "./types.js";
import { visibleSeries } from "./spec.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const PALETTE = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
  "#edc949", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

export interface RenderCallbacks {
  onToggle: (seriesName: string) => void;
  onDrilldown: (route: DrilldownRoute) => void;
}

interface Frame {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

const WIDTH = 760;
const HEIGHT = 430;

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  return node;
}

function seriesColor(spec: ChartSpec, series: ChartSeries): string {
  const index = spec.series.findIndex((s) => s.name === series.name);
  return PALETTE[index % PALETTE.length];
}

function valueRange(spec: ChartSpec): [number, number] {
  if (spec.kind === "stacked_percent_column") return [0, 100];
  const visible = visibleSeries(spec);
  let low = 0;
  let high = 0;
  if (spec.kind === "stacked_column") {
    spec.x_categories.forEach((_, i) => {
      let up = 0;
      let down = 0;
      for (const s of visible) {
        const v = s.values[i];
        if (v === null) continue;
        if (v >= 0) up += v;
        else down += v;
      }
      high = Math.max(high, up);
      low = Math.min(low, down);
    });
  } else {
    for (const s of visible) {
      for (const v of s.values) {
        if (v === null) continue;
        high = Math.max(high, v);
        low = Math.min(low, v);
      }
    }
  }
  if (high === low) high = low + 1;
  return [low, high];
}

export function renderChart(
  spec: ChartSpec,
  container: HTMLElement,
  callbacks: RenderCallbacks,
): void {
  container.textContent = "";
  const svg = el("svg", {
    width: WIDTH,
    height: HEIGHT,
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    role: "img",
  });
  svg.appendChild(
    Object.assign(el("text", { x: WIDTH / 2, y: 20, "text-anchor": "middle", class: "chart-title" }), {
      textContent: spec.title,
    }),
  );
  if (spec.kind === "pie") {
    renderPie(spec, svg, callbacks);
  } else {
    renderAxes(spec, svg, callbacks);
  }
  container.appendChild(svg);
  container.appendChild(renderLegend(spec, callbacks));
  container.appendChild(tooltipHost());
}

function tooltipHost(): HTMLElement {
  const tip = document.createElement("div");
  tip.className = "tooltip";
  tip.hidden = true;
  return tip;
}

function attachTooltip(
  shape: SVGElement,
  spec: ChartSpec,
  series: ChartSeries,
  xIndex: number,
): void {
  const tooltip = series.tooltips[xIndex];
  shape.addEventListener("mouseenter", (event) => {
    const host = (event.currentTarget as SVGElement).ownerDocument
      .querySelector<HTMLElement>(".tooltip");
    if (!host || tooltip.absolute === null) return;
    const parts = [`${series.name} - ${spec.x_categories[xIndex]}`];
    if (tooltip.percent !== null) {
      parts.push(`${tooltip.percent.toFixed(1)} %`);
    }
    parts.push(`${tooltip.absolute}${spec.unit ? ` ${spec.unit}` : ""}`);
    host.textContent = parts.join(" | ");
    host.hidden = false;
  });
  shape.addEventListener("mouseleave", (event) => {
    const host = (event.currentTarget as SVGElement).ownerDocument
      .querySelector<HTMLElement>(".tooltip");
    if (host) host.hidden = true;
  });
}

function renderLegend(spec: ChartSpec, callbacks: RenderCallbacks): HTMLElement {
  const legend = document.createElement("div");
  legend.className = "legend";
  for (const series of spec.series) {
    const item = document.createElement("button");
    item.type = "button";
    item.className = series.visible ? "legend-item" : "legend-item hidden-series";
    item.dataset.series = series.name;
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.backgroundColor = seriesColor(spec, series);
    item.appendChild(swatch);
    item.appendChild(document.createTextNode(series.name));
    item.addEventListener("click", () => callbacks.onToggle(series.name));
    legend.appendChild(item);
  }
  return legend;
}

function renderAxes(spec: ChartSpec, svg: SVGSVGElement, callbacks: RenderCallbacks): void {
  const frame: Frame = { x0: 64, y0: 40, x1: WIDTH - 20, y1: HEIGHT - 60 };
  const [low, high] = valueRange(spec);
  const toY = (value: number) =>
    frame.y1 - ((value - low) / (high - low)) * (frame.y1 - frame.y0);

  svg.appendChild(el("line", {
    x1: frame.x0, y1: frame.y0, x2: frame.x0, y2: frame.y1, stroke: "#444", class: "axis",
  }));
  const zeroY = toY(Math.max(Math.min(0, high), low));
  svg.appendChild(el("line", {
    x1: frame.x0, y1: zeroY, x2: frame.x1, y2: zeroY, stroke: "#444", class: "axis",
  }));
  for (let i = 0; i < 5; i++) {
    const tick = low + ((high - low) * i) / 4;
    svg.appendChild(
      Object.assign(
        el("text", { x: frame.x0 - 6, y: toY(tick) + 3, "text-anchor": "end", class: "ytick" }),
        { textContent: formatTick(tick) },
      ),
    );
  }

  const slot = (frame.x1 - frame.x0) / Math.max(spec.x_categories.length, 1);
  spec.x_categories.forEach((label, i) => {
    const text = el("text", {
      x: frame.x0 + slot * (i + 0.5),
      y: frame.y1 + 16,
      "text-anchor": "middle",
      class: "xtick",
    });
    text.textContent = label;
    const route = spec.drilldown?.[label];
    if (route) {
      text.setAttribute("class", "xtick drilldown");
      text.addEventListener("click", () => callbacks.onDrilldown(route));
    }
    svg.appendChild(text);
  });

  if (spec.kind === "line") {
    renderLines(spec, svg, frame, slot, toY);
  } else if (spec.kind === "stacked_column" || spec.kind === "stacked_percent_column") {
    renderStacks(spec, svg, frame, slot, toY, callbacks);
  } else {
    renderColumns(spec, svg, frame, slot, toY, zeroY, callbacks);
  }
}

function renderLines(
  spec: ChartSpec,
  svg: SVGSVGElement,
  frame: Frame,
  slot: number,
  toY: (v: number) => number,
): void {
  for (const series of visibleSeries(spec)) {
    const color = seriesColor(spec, series);
    const points: Array<[number, number, number]> = [];
    series.values.forEach((value, i) => {
      if (value === null) return;
      points.push([frame.x0 + slot * (i + 0.5), toY(value), i]);
    });
    if (points.length > 1) {
      svg.appendChild(el("polyline", {
        points: points.map(([x, y]) => `${x},${y}`).join(" "),
        fill: "none",
        stroke: color,
        "stroke-width": 2,
        class: "series-line",
      }));
    }
    for (const [x, y, i] of points) {
      const dot = el("circle", { cx: x, cy: y, r: 3.5, fill: color, class: "dp" });
      dot.dataset.series = series.name;
      dot.dataset.x = spec.x_categories[i];
      attachTooltip(dot, spec, series, i);
      svg.appendChild(dot);
    }
  }
}

function renderColumns(
  spec: ChartSpec,
  svg: SVGSVGElement,
  frame: Frame,
  slot: number,
  toY: (v: number) => number,
  zeroY: number,
  callbacks: RenderCallbacks,
): void {
  const visible = visibleSeries(spec);
  if (!visible.length) return;
  const groupWidth = slot * 0.8;
  const barWidth = groupWidth / visible.length;
  spec.x_categories.forEach((label, i) => {
    const left = frame.x0 + slot * i + slot * 0.1;
    visible.forEach((series, j) => {
      const value = series.values[i];
      if (value === null) return;
      const y = toY(value);
      const rect = el("rect", {
        x: left + j * barWidth,
        y: Math.min(y, zeroY),
        width: barWidth,
        height: Math.abs(y - zeroY),
        fill: seriesColor(spec, series),
        class: "dp",
      });
      rect.dataset.series = series.name;
      rect.dataset.x = label;
      attachTooltip(rect, spec, series, i);
      const route = spec.drilldown?.[label];
      if (route) {
        rect.setAttribute("class", "dp drilldown");
        rect.addEventListener("click", () => callbacks.onDrilldown(route));
      }
      svg.appendChild(rect);
    });
  });
}

function renderStacks(
  spec: ChartSpec,
  svg: SVGSVGElement,
  frame: Frame,
  slot: number,
  toY: (v: number) => number,
  callbacks: RenderCallbacks,
): void {
  const percent = spec.kind === "stacked_percent_column";
  spec.x_categories.forEach((label, i) => {
    const left = frame.x0 + slot * i + slot * 0.2;
    let upBase = 0;
    let downBase = 0;
    for (const series of visibleSeries(spec)) {
      const value = series.values[i];
      if (value === null) continue;
      const segment = percent ? Math.max(series.tooltips[i].percent ?? 0, 0) : value;
      let yTop: number;
      let yBottom: number;
      if (segment >= 0) {
        yTop = toY(upBase + segment);
        yBottom = toY(upBase);
        upBase += segment;
      } else {
        yTop = toY(downBase);
        yBottom = toY(downBase + segment);
        downBase += segment;
      }
      const rect = el("rect", {
        x: left,
        y: Math.min(yTop, yBottom),
        width: slot * 0.6,
        height: Math.abs(yBottom - yTop),
        fill: seriesColor(spec, series),
        class: "dp",
      });
      rect.dataset.series = series.name;
      rect.dataset.x = label;
      attachTooltip(rect, spec, series, i);
      const route = spec.drilldown?.[label];
      if (route) {
        rect.addEventListener("click", () => callbacks.onDrilldown(route));
      }
      svg.appendChild(rect);
    }
  });
}

function renderPie(spec: ChartSpec, svg: SVGSVGElement, _callbacks: RenderCallbacks): void {
  const series = visibleSeries(spec)[0];
  if (!series) return;
  const cx = WIDTH / 2;
  const cy = (HEIGHT + 20) / 2;
  const radius = Math.min(WIDTH, HEIGHT - 60) * 0.36;
  const total = series.values.reduce<number>((sum, v) => (v !== null ? sum + v : sum), 0);
  let angle = -Math.PI / 2;
  series.values.forEach((value, i) => {
    if (value === null) return;
    const color = PALETTE[i % PALETTE.length];
    let shape: SVGElement;
    if (total <= 0 || value <= 0) {
      shape = el("path", { d: `M${cx},${cy} Z`, fill: color, class: "dp" });
    } else if (value >= total) {
      shape = el("circle", { cx, cy, r: radius, fill: color, class: "dp" });
    } else {
      const sweep = (value / total) * 2 * Math.PI;
      const x1 = cx + radius * Math.cos(angle);
      const y1 = cy + radius * Math.sin(angle);
      const x2 = cx + radius * Math.cos(angle + sweep);
      const y2 = cy + radius * Math.sin(angle + sweep);
      const large = sweep > Math.PI ? 1 : 0;
      shape = el("path", {
        d: `M${cx},${cy} L${x1},${y1} A${radius},${radius} 0 ${large} 1 ${x2},${y2} Z`,
        fill: color,
        class: "dp",
      });
      angle += sweep;
    }
    (shape as SVGElement & { dataset: DOMStringMap }).dataset.x = spec.x_categories[i];
    attachTooltip(shape, spec, series, i);
    svg.appendChild(shape);
  });
}

function formatTick(value: number): string {
  const rounded = Math.round(value * 100) / 100;
  return String(rounded);
}
