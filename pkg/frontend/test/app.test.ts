// Integration tests against frozen API responses captured from the real
// service, so the client is exercised on the true wire format.

import { readFileSync } from "node:fs";
import { resolve } from "node:path";
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { boot } from "../src/app.js";

function fixture(name: string): unknown {
  return JSON.parse(readFileSync(resolve(__dirname, "fixtures", name), "utf-8"));
}

const ROUTES: Record<string, unknown> = {
  "/api/groups": fixture("groups.json"),
  "/api/statistic/25": fixture("statistic_25.json"),
  "/api/statistic/1": fixture("statistic_1.json"),
  "/api/statistic/25/chart?kind=column_drilldown": fixture("chart_25_drilldown.json"),
  "/api/statistic/25/chart?filter=region:ringerike": fixture("chart_25_detail.json"),
  "/api/statistic/25/table": fixture("table_25.json"),
};

function normalize(url: string): string {
  const withoutOrigin = url.replace(/^https?:\/\/[^/]+/, "");
  return decodeURIComponent(withoutOrigin);
}

async function flush(): Promise<void> {
  for (let i = 0; i < 8; i++) {
    await new Promise((resolveTick) => setTimeout(resolveTick, 0));
  }
}

describe("exploration app", () => {
  beforeEach(() => {
    document.body.innerHTML = '<div id="app"></div>';
    vi.stubGlobal(
      "fetch",
      vi.fn(async (input: RequestInfo | URL) => {
        const key = normalize(String(input));
        const body = ROUTES[key];
        if (body === undefined) {
          return new Response(JSON.stringify({ detail: `no fixture for ${key}` }), {
            status: 404,
            headers: { "content-type": "application/json" },
          });
        }
        return new Response(JSON.stringify(body), {
          status: 200,
          headers: { "content-type": "application/json" },
        });
      }),
    );
  });

  afterEach(() => {
    vi.unstubAllGlobals();
  });

  async function bootAt(path: string) {
    history.pushState(null, "", path);
    const app = boot(document.getElementById("app") as HTMLElement);
    await flush();
    return app;
  }

  it("deep link renders the chart and the description", async () => {
    await bootAt("/statistic/25");
    expect(document.querySelector("#variable-title")?.textContent).toContain(
      "Age-wise population",
    );
    expect(document.querySelector("#variable-description")?.textContent).toContain(
      "age groups",
    );
    const bars = document.querySelectorAll("#chart rect.dp");
    expect(bars.length).toBe(12); // 4 series x 3 regions
    const menuLink = document.querySelector('#menu a[data-variable="25"]');
    expect(menuLink).not.toBeNull();
  });

  it("legend toggle rescales percentages over the visible series", async () => {
    await bootAt("/statistic/25");
    const heightOf = (series: string, x: string) => {
      const rect = document.querySelector(
        `#chart rect.dp[data-series="${series}"][data-x="${x}"]`,
      ) as SVGRectElement;
      return Number(rect.getAttribute("height"));
    };
    const plotHeight = 330; // full percent axis in pixels
    const before = heightOf("0-17", "Ringerike");
    expect(before).toBeCloseTo((8600 / 43000) * plotHeight, 6);

    const toggle = document.querySelector(
      '.legend-item[data-series="67+"]',
    ) as HTMLButtonElement;
    toggle.click();
    await flush();

    expect(
      document.querySelector('#chart rect.dp[data-series="67+"]'),
    ).toBeNull();
    const after = heightOf("0-17", "Ringerike");
    expect(after).toBeCloseTo((8600 / (43000 - 5100)) * plotHeight, 6);

    // hide all but one series: the survivor fills the whole column
    (document.querySelector('.legend-item[data-series="18-34"]') as HTMLButtonElement).click();
    (document.querySelector('.legend-item[data-series="35-66"]') as HTMLButtonElement).click();
    await flush();
    expect(heightOf("0-17", "Ringerike")).toBeCloseTo(plotHeight, 6);
  });

  it("toggling a series back restores the original rendering", async () => {
    await bootAt("/statistic/25");
    const snapshot = () =>
      Array.from(document.querySelectorAll("#chart rect.dp")).map((rect) => [
        (rect as SVGRectElement).dataset.series,
        rect.getAttribute("height"),
      ]);
    const original = snapshot();
    const toggle = document.querySelector(
      '.legend-item[data-series="18-34"]',
    ) as HTMLButtonElement;
    toggle.click();
    await flush();
    toggle.click();
    await flush();
    expect(snapshot()).toEqual(original);
  });

  it("drilldown click navigates to the detail view and back restores", async () => {
    const app = await bootAt("/statistic/25?kind=column_drilldown");
    await flush();
    const column = document.querySelector(
      '#chart rect.dp[data-x="Ringerike"]',
    ) as SVGRectElement;
    expect(column).not.toBeNull();
    column.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await flush();

    expect(window.location.pathname).toBe("/statistic/25");
    expect(decodeURIComponent(window.location.search)).toBe("?filter=region:ringerike");
    const detailTicks = Array.from(document.querySelectorAll("#chart text.xtick")).map(
      (t) => t.textContent,
    );
    expect(detailTicks).toEqual(["0-17", "18-34", "35-66", "67+"]);

    history.back();
    await flush();
    void app;
    expect(decodeURIComponent(window.location.search)).toBe("?kind=column_drilldown");
    const comparisonTicks = Array.from(
      document.querySelectorAll("#chart text.xtick"),
    ).map((t) => t.textContent);
    expect(comparisonTicks).toEqual(["Ringerike", "Hole", "Jevnaker"]);
  });

  it("download buttons point at the export endpoint", async () => {
    await bootAt("/statistic/25");
    const csv = document.querySelector("#download-csv") as HTMLAnchorElement;
    const svg = document.querySelector("#download-svg") as HTMLAnchorElement;
    expect(csv.getAttribute("href")).toBe("/api/statistic/25/export?format=csv");
    expect(svg.getAttribute("href")).toBe("/api/statistic/25/export?format=svg");
  });

  it("table toggle shows values identical to the chart payload", async () => {
    await bootAt("/statistic/25");
    (document.querySelector("#table-toggle") as HTMLButtonElement).click();
    await flush();
    const table = fixture("table_25.json") as { headers: string[]; rows: unknown[][] };
    const headerCells = Array.from(document.querySelectorAll("#table-host th")).map(
      (cell) => cell.textContent,
    );
    expect(headerCells).toEqual(table.headers);
    const firstRow = Array.from(
      document.querySelectorAll("#table-host tbody tr:first-child td"),
    ).map((cell) => cell.textContent);
    expect(firstRow[0]).toBe("Ringerike");
    expect(firstRow.slice(1).map(Number)).toEqual(table.rows[0].slice(1));
  });

  it("unknown variable shows the not-found page", async () => {
    await bootAt("/statistic/999999");
    expect(document.querySelector("#view .error")?.textContent).toContain(
      "No such statistic",
    );
  });
});
