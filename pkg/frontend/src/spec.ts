// Client-side chart-spec semantics. Legend toggles flip visibility and,
// for percentage kinds, rescale plotted shares over the series that stay
// visible; absolutes never change. This must agree exactly with the
// server library; the shared conformance fixtures pin both sides.

import type { ChartSpec, ChartSeries, Tooltip } from "./types.js";

const PERCENT_KINDS = new Set(["stacked_percent_column", "pie"]);

function plainTooltips(series: ChartSeries): Tooltip[] {
  return series.values.map((v) => ({ absolute: v, percent: null }));
}

export function recomputePercentages(spec: ChartSpec): ChartSpec {
  if (!PERCENT_KINDS.has(spec.kind)) {
    return {
      ...spec,
      series: spec.series.map((s) => ({ ...s, tooltips: plainTooltips(s) })),
      degenerate_columns: [],
    };
  }

  if (spec.kind === "stacked_percent_column") {
    const totals = spec.x_categories.map((_, i) =>
      spec.series.reduce(
        (sum, s) => (s.visible && s.values[i] !== null ? sum + (s.values[i] as number) : sum),
        0,
      ),
    );
    const degenerate = spec.x_categories.filter((_, i) => totals[i] <= 0);
    const series = spec.series.map((s) => {
      if (!s.visible) {
        return { ...s, tooltips: plainTooltips(s) };
      }
      const tooltips = s.values.map((value, i): Tooltip => {
        if (value === null) return { absolute: null, percent: null };
        if (totals[i] <= 0) return { absolute: value, percent: 0 };
        return { absolute: value, percent: (value / totals[i]) * 100 };
      });
      return { ...s, tooltips };
    });
    return { ...spec, series, degenerate_columns: degenerate };
  }

  // pie: shares across the x positions of the single visible series
  let degenerate: string[] = [];
  const series = spec.series.map((s) => {
    if (!s.visible) {
      return { ...s, tooltips: plainTooltips(s) };
    }
    const total = s.values.reduce<number>((sum, v) => (v !== null ? sum + v : sum), 0);
    if (total <= 0) {
      degenerate = [...spec.x_categories];
      return {
        ...s,
        tooltips: s.values.map((v): Tooltip => ({ absolute: v, percent: v === null ? null : 0 })),
      };
    }
    return {
      ...s,
      tooltips: s.values.map(
        (v): Tooltip => ({ absolute: v, percent: v === null ? null : (v / total) * 100 }),
      ),
    };
  });
  return { ...spec, series, degenerate_columns: degenerate };
}

export function toggleSeries(spec: ChartSpec, name: string): ChartSpec {
  if (!spec.series.some((s) => s.name === name)) {
    throw new Error(`chart has no series named '${name}'`);
  }
  const series = spec.series.map((s) =>
    s.name === name ? { ...s, visible: !s.visible } : s,
  );
  return recomputePercentages({ ...spec, series });
}

export function visibleSeries(spec: ChartSpec): ChartSeries[] {
  return spec.series.filter((s) => s.visible);
}
