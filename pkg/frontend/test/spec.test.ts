// The client-side percent recompute must match the shared conformance
// fixtures exactly; the server library is pinned to the same file.

import { readFileSync } from "node:fs";
import { resolve } from "node:path";
import { describe, expect, it } from "vitest";

import { recomputePercentages, toggleSeries } from "../src/spec.js";
import type { ChartSpec } from "../src/types.js";

interface ConformanceStep {
  toggle: string | null;
  visible: boolean[];
  percents: Array<Array<number | null>>;
  degenerate: string[];
}

interface ConformanceCase {
  name: string;
  kind: string;
  x_categories: string[];
  series: Array<{ name: string; values: Array<number | null> }>;
  steps: ConformanceStep[];
}

const fixture = JSON.parse(
  readFileSync(resolve(__dirname, "../../conformance/percent_toggle.json"), "utf-8"),
) as { cases: ConformanceCase[] };

function initialSpec(testCase: ConformanceCase): ChartSpec {
  return recomputePercentages({
    variable: 990,
    kind: testCase.kind,
    title: "Conformance case",
    unit: null,
    x_label: "X",
    x_categories: testCase.x_categories,
    series: testCase.series.map((s) => ({
      name: s.name,
      visible: true,
      values: s.values,
      tooltips: s.values.map((v) => ({ absolute: v, percent: null })),
    })),
    drilldown: null,
    degenerate_columns: [],
    provenance: [],
  });
}

describe("percent toggle conformance", () => {
  for (const testCase of fixture.cases) {
    it(testCase.name, () => {
      let spec = initialSpec(testCase);
      for (const step of testCase.steps) {
        if (step.toggle !== null) {
          spec = toggleSeries(spec, step.toggle);
        }
        expect(spec.series.map((s) => s.visible)).toEqual(step.visible);
        spec.series.forEach((series, seriesIndex) => {
          series.tooltips.forEach((tooltip, x) => {
            const expected = step.percents[seriesIndex][x];
            if (expected === null) {
              expect(tooltip.percent).toBeNull();
            } else {
              expect(tooltip.percent).not.toBeNull();
              expect(Math.abs((tooltip.percent as number) - expected)).toBeLessThan(1e-9);
            }
          });
        });
        expect(spec.degenerate_columns).toEqual(step.degenerate);
      }
    });
  }

  it("toggling twice restores the original spec", () => {
    const testCase = fixture.cases[0];
    const spec = initialSpec(testCase);
    const restored = toggleSeries(toggleSeries(spec, testCase.series[0].name), testCase.series[0].name);
    expect(restored).toEqual(spec);
  });

  it("rejects unknown series names", () => {
    const spec = initialSpec(fixture.cases[0]);
    expect(() => toggleSeries(spec, "nope")).toThrow(/no series/);
  });
});
