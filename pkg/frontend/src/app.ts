// Page assembly: navigation menu, variable chrome (description, related
// links, alternative graph selector, downloads, data table) and the
// chart itself. All view state lives in the URL.

import {
  ApiError,
  currentSequence,
  exportUrl,
  fetchChart,
  fetchGroups,
  fetchStatistic,
  fetchTable,
  nextSequence,
} from "./api.js";
import { renderChart } from "./render.js";
import { Router, type ViewState } from "./router.js";
import { toggleSeries } from "./spec.js";
import type { ChartSpec, StatisticPayload, NavGroup } from "./types.js";

export class App {
  private root: HTMLElement;
  private router: Router;
  private currentSpec: ChartSpec | null = null;

  constructor(root: HTMLElement) {
    this.root = root;
    this.router = new Router((state) => void this.loadView(state));
  }

  async start(): Promise<void> {
    this.root.innerHTML = `
      <header><h1><a href="/" id="home-link">Growth barometer</a></h1></header>
      <div class="layout">
        <nav id="menu" aria-label="Statistics"></nav>
        <main id="view"><p class="placeholder">Pick a statistic from the menu.</p></main>
      </div>`;
    try {
      const { groups } = await fetchGroups();
      this.renderMenu(groups);
    } catch (error) {
      this.menu().textContent = `Could not load the navigation: ${String(error)}`;
    }
    this.router.dispatch();
  }

  private menu(): HTMLElement {
    return this.root.querySelector("#menu") as HTMLElement;
  }

  private view(): HTMLElement {
    return this.root.querySelector("#view") as HTMLElement;
  }

  private renderMenu(groups: NavGroup[]): void {
    const menu = this.menu();
    menu.textContent = "";
    for (const group of groups) {
      const section = document.createElement("section");
      const heading = document.createElement("h2");
      heading.textContent = group.label;
      section.appendChild(heading);
      for (const category of group.categories) {
        if (!category.variables.length) continue;
        const title = document.createElement("h3");
        title.textContent = category.label;
        section.appendChild(title);
        const list = document.createElement("ul");
        for (const variable of category.variables) {
          const item = document.createElement("li");
          const link = document.createElement("a");
          link.href = `/statistic/${variable.number}`;
          link.textContent = variable.title;
          link.dataset.variable = String(variable.number);
          link.addEventListener("click", (event) => {
            event.preventDefault();
            this.router.navigate({ variable: variable.number, kind: null, filter: {} });
          });
          item.appendChild(link);
          list.appendChild(item);
        }
        section.appendChild(list);
      }
      menu.appendChild(section);
    }
  }

  async loadView(state: ViewState): Promise<void> {
    const sequence = nextSequence();
    let payload: StatisticPayload;
    try {
      payload = await fetchStatistic(state.variable);
    } catch (error) {
      if (sequence === currentSequence()) this.renderError(error);
      return;
    }
    let spec = payload.chart;
    if (state.kind || Object.keys(state.filter).length) {
      try {
        spec = await fetchChart(state);
      } catch (error) {
        if (sequence === currentSequence()) this.renderError(error);
        return;
      }
    }
    if (sequence !== currentSequence()) return; // a newer view superseded this one
    this.currentSpec = spec;
    this.renderView(payload, spec, state);
  }

  private renderError(error: unknown): void {
    const view = this.view();
    view.innerHTML = "";
    const box = document.createElement("p");
    box.className = "error";
    box.textContent =
      error instanceof ApiError && error.status === 404
        ? "No such statistic."
        : `Something went wrong: ${String(error)}`;
    view.appendChild(box);
  }

  private renderView(payload: StatisticPayload, spec: ChartSpec, state: ViewState): void {
    const view = this.view();
    view.innerHTML = `
      <article class="variable">
        <h2 id="variable-title"></h2>
        <p id="variable-description"></p>
        <div id="chart"></div>
        <div class="controls">
          <label>Graph:
            <select id="kind-select"></select>
          </label>
          <a id="download-csv" class="download">Download CSV</a>
          <a id="download-svg" class="download">Download SVG</a>
          <button id="table-toggle" type="button">Show table</button>
        </div>
        <div id="table-host" hidden></div>
        <section id="related">
          <div id="related-documents"></div>
          <div id="related-variables"></div>
        </section>
        <p id="provenance" class="provenance"></p>
      </article>`;

    (view.querySelector("#variable-title") as HTMLElement).textContent =
      `${payload.variable.number}. ${payload.variable.title}`;
    (view.querySelector("#variable-description") as HTMLElement).textContent =
      payload.variable.description;

    this.renderChartInto(view.querySelector("#chart") as HTMLElement, spec);

    const kinds = [payload.variable.default_chart, ...payload.variable.alternative_charts];
    const select = view.querySelector("#kind-select") as HTMLSelectElement;
    for (const kind of kinds) {
      const option = document.createElement("option");
      option.value = kind;
      option.textContent = kind.split("_").join(" ");
      option.selected = kind === spec.kind;
      select.appendChild(option);
    }
    select.addEventListener("change", () => {
      this.router.navigate({ ...state, kind: select.value });
    });

    (view.querySelector("#download-csv") as HTMLAnchorElement).href = exportUrl(state, "csv");
    (view.querySelector("#download-svg") as HTMLAnchorElement).href = exportUrl(state, "svg");

    const tableToggle = view.querySelector("#table-toggle") as HTMLButtonElement;
    tableToggle.addEventListener("click", () => void this.toggleTable(state));

    const documents = view.querySelector("#related-documents") as HTMLElement;
    if (payload.variable.related_documents.length) {
      documents.appendChild(heading3("Related documents"));
      const list = document.createElement("ul");
      for (const doc of payload.variable.related_documents) {
        const item = document.createElement("li");
        const link = document.createElement("a");
        link.href = doc.url;
        link.textContent = doc.label;
        link.rel = "noopener";
        item.appendChild(link);
        list.appendChild(item);
      }
      documents.appendChild(list);
    }

    const relatedHost = view.querySelector("#related-variables") as HTMLElement;
    if (payload.variable.related_variables.length) {
      relatedHost.appendChild(heading3("Related statistics"));
      const list = document.createElement("ul");
      for (const related of payload.variable.related_variables) {
        const item = document.createElement("li");
        const link = document.createElement("a");
        link.href = `/statistic/${related.number}`;
        link.textContent = related.title;
        link.className = "related-variable";
        link.addEventListener("click", (event) => {
          event.preventDefault();
          this.router.navigate({ variable: related.number, kind: null, filter: {} });
        });
        item.appendChild(link);
        list.appendChild(item);
      }
      relatedHost.appendChild(list);
    }

    (view.querySelector("#provenance") as HTMLElement).textContent = spec.provenance
      .map(([source, version]) => `${source} v${version}`)
      .join(", ");
  }

  private renderChartInto(host: HTMLElement, spec: ChartSpec): void {
    renderChart(spec, host, {
      onToggle: (name) => {
        if (!this.currentSpec) return;
        this.currentSpec = toggleSeries(this.currentSpec, name);
        this.renderChartInto(host, this.currentSpec);
      },
      onDrilldown: (route) => {
        this.router.navigate({ variable: route.variable, kind: null, filter: route.filter });
      },
    });
  }

  private async toggleTable(state: ViewState): Promise<void> {
    const host = this.view().querySelector("#table-host") as HTMLElement;
    const toggle = this.view().querySelector("#table-toggle") as HTMLButtonElement;
    if (!host.hidden) {
      host.hidden = true;
      toggle.textContent = "Show table";
      return;
    }
    const table = await fetchTable(state);
    host.textContent = "";
    const element = document.createElement("table");
    const head = element.createTHead().insertRow();
    for (const header of table.headers) {
      const cell = document.createElement("th");
      cell.textContent = header;
      head.appendChild(cell);
    }
    const body = element.createTBody();
    for (const row of table.rows) {
      const tr = body.insertRow();
      for (const value of row) {
        tr.insertCell().textContent = value === null ? "" : String(value);
      }
    }
    host.appendChild(element);
    host.hidden = false;
    toggle.textContent = "Hide table";
  }
}

function heading3(text: string): HTMLElement {
  const heading = document.createElement("h3");
  heading.textContent = text;
  return heading;
}

export function boot(root: HTMLElement): App {
  const app = new App(root);
  void app.start();
  return app;
}
